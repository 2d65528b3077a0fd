//! Integrator against closed-form motion and conservation along orbits.

use std::f64::consts::PI;

use superint::dynamics::{conservation_drift, integrate, OrbitStatus};
use superint::report::conserved_names;
use superint::sampler::{Sampler, SamplerConfig};
use superint::systems::{Chart, PhasePoint, RationalK, SystemParams};

fn k(s: &str) -> RationalK {
    s.parse().unwrap()
}

fn kepler(alpha: f64) -> SystemParams {
    SystemParams::kc4(alpha, 0.0, 0.0, 0.0, RationalK::ONE, RationalK::ONE)
}

fn first_point(p: &SystemParams, seed: u64) -> PhasePoint {
    Sampler::new(p, SamplerConfig::with_seed(seed))
        .sample(1)
        .unwrap()[0]
}

#[test]
fn free_particle_moves_in_a_straight_line() {
    // H = p², so x(t) = x0 + 2 p t.
    let p = kepler(0.0);
    let x0 = PhasePoint::new(Chart::Cartesian, [0.3, -0.4, 1.2], [0.5, 0.25, -0.1]);
    let t = integrate(&x0, &p, 3.0, 1e-10).unwrap();
    assert!(t.completed());
    let end = t.last();
    for i in 0..3 {
        assert!((end.q[i] - (x0.q[i] + 2.0 * x0.p[i] * 3.0)).abs() < 1e-10);
        assert!((end.p[i] - x0.p[i]).abs() < 1e-12);
    }
}

#[test]
fn circular_kepler_orbit_closes_after_one_period() {
    // Mass ½: ẍ = 2α q/r³, so a circle of radius R has v² = 2|α|/R and p = v/2.
    let (alpha, radius) = (-2.0, 1.5);
    let p = kepler(alpha);
    let v = (2.0 * alpha.abs() / radius).sqrt();
    let x0 = PhasePoint::new(Chart::Cartesian, [radius, 0.0, 0.0], [0.0, v / 2.0, 0.0]);
    let period = 2.0 * PI * radius / v;
    let t = integrate(&x0, &p, period, 1e-12).unwrap();
    assert!(t.completed());
    for s in &t.states {
        let r = (s.q[0] * s.q[0] + s.q[1] * s.q[1] + s.q[2] * s.q[2]).sqrt();
        assert!((r - radius).abs() < 1e-8, "radius {r}");
    }
    let end = t.last();
    assert!((end.q[0] - radius).abs() < 1e-8 && end.q[1].abs() < 1e-8);
    assert!(end.p[0].abs() < 1e-8 && (end.p[1] - v / 2.0).abs() < 1e-8);
}

#[test]
fn every_conserved_quantity_stays_put() {
    for p in [
        SystemParams::kc3(1.0, 2.0, 3.0, k("3"), k("5/3")),
        SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k("1"), k("1")),
        SystemParams::kc4(-1.5, 0.8, 2.5, 1.1, k("1/3"), k("1")),
    ] {
        let names = conserved_names(&p);
        assert!(names.contains(&"H") && names.contains(&"J_ratio"));
        let t = integrate(&first_point(&p, 11), &p, 5.0, 1e-10).unwrap();
        for n in names {
            let d = conservation_drift(n, &t, &p).unwrap();
            assert!(d < 1e-6, "{n}: drift {d:e}");
        }
    }
}

#[test]
fn tighter_tolerance_means_smaller_drift() {
    let p = SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k("1"), k("1"));
    let x0 = first_point(&p, 12);
    let drift =
        |tol: f64| conservation_drift("H", &integrate(&x0, &p, 10.0, tol).unwrap(), &p).unwrap();
    let (loose, mid, tight) = (drift(1e-8), drift(1e-10), drift(1e-12));
    assert!(tight < mid && mid < loose, "{loose:e} {mid:e} {tight:e}");
}

#[test]
fn reversing_momenta_retraces_the_orbit() {
    let p = SystemParams::kc3(1.0, 2.0, 3.0, k("1"), k("1"));
    let x0 = first_point(&p, 13);
    let fwd = integrate(&x0, &p, 2.0, 1e-12).unwrap();
    assert!(fwd.completed());
    let e = fwd.last();
    let flipped = PhasePoint::new(e.chart, e.q, [-e.p[0], -e.p[1], -e.p[2]]);
    let back = integrate(&flipped, &p, 2.0, 1e-12).unwrap();
    let b = back.last();
    for i in 0..3 {
        assert!((b.q[i] - x0.q[i]).abs() < 1e-7 * x0.q[i].abs().max(1.0));
        assert!((-b.p[i] - x0.p[i]).abs() < 1e-7 * x0.p[i].abs().max(1.0));
    }
}

#[test]
fn radial_infall_stops_near_the_centre() {
    let p = kepler(-1.0);
    let x0 = PhasePoint::new(Chart::Cartesian, [1.0, 0.0, 0.0], [0.0; 3]);
    let t = integrate(&x0, &p, 10.0, 1e-10).unwrap();
    match &t.status {
        OrbitStatus::SingularityApproach { t: stop, reason } => {
            assert!(reason.starts_with("r ="), "{reason}");
            // Fall time from rest at r = 1 with ẍ = -2/r²: π / 4.
            assert!(*stop < PI / 4.0 + 1e-3);
        }
        s => panic!("expected a stop, got {s:?}"),
    }
}
