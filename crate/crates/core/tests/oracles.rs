//! Catalog values against formulas written out independently here.

use superint::catalog::Catalog;
use superint::numeric::{bracket_term, C64};
use superint::sampler::{Sampler, SamplerConfig};
use superint::systems::{Chart, PhasePoint, RationalK, SystemParams};

fn kc4_unit() -> SystemParams {
    SystemParams::kc4(1.0, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE)
}

fn kc3_unit() -> SystemParams {
    SystemParams::kc3(1.0, 2.0, 3.0, RationalK::ONE, RationalK::ONE)
}

fn sample(p: &SystemParams, seed: u64, n: usize) -> Vec<PhasePoint> {
    Sampler::new(p, SamplerConfig::with_seed(seed))
        .sample(n)
        .unwrap()
}

fn rel(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(a.norm()).max(b.norm()).max(1.0)
}

/// Cartesian position and momentum from spherical data, by the chain rule
/// written out by hand.
fn to_cartesian(x: &PhasePoint) -> ([f64; 3], [f64; 3]) {
    let [r, t, f] = x.q;
    let [pr, pt, pf] = x.p;
    let (st, ct, sf, cf) = (t.sin(), t.cos(), f.sin(), f.cos());
    let pos = [r * st * cf, r * st * sf, r * ct];
    let mom = [
        pr * st * cf + pt * ct * cf / r - pf * sf / (r * st),
        pr * st * sf + pt * ct * sf / r + pf * cf / (r * st),
        pr * ct - pt * st / r,
    ];
    (pos, mom)
}

#[test]
fn core_constants_match_cartesian_formulas() {
    for p in [kc3_unit(), kc4_unit()] {
        let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.d());
        for x in sample(&p, 21, 100) {
            let ([qx, qy, qz], [px, py, pz]) = to_cartesian(&x);
            let r2 = qx * qx + qy * qy + qz * qz;
            let lz = qx * py - qy * px;
            let ly = qz * px - qx * pz;
            let lx = qy * pz - qz * py;
            let mut h = px * px + py * py + pz * pz + a / r2.sqrt() + b / (qx * qx) + g / (qy * qy);
            let mut l2 = lx * lx + ly * ly + lz * lz + b * r2 / (qx * qx) + g * r2 / (qy * qy);
            if d != 0.0 {
                h += d / (qz * qz);
                l2 += d * r2 / (qz * qz);
            }
            let rho2 = qx * qx + qy * qy;
            let l3 = lz * lz + b * rho2 / (qx * qx) + g * rho2 / (qy * qy);
            let c = Catalog::evaluate(&x, &p).unwrap();
            for (name, want) in [("H", h), ("L2", l2), ("L3", l3)] {
                let got = c.require(name).unwrap().value;
                assert!(
                    rel(got, C64::new(want, 0.0), 0.0) < 1e-12,
                    "{name}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn angular_term_vanishes_at_zero_momentum() {
    let p = kc4_unit();
    let (qx, qy, qz) = (0.8, -1.1, 0.6);
    let x = PhasePoint::new(Chart::Cartesian, [qx, qy, qz], [0.0; 3]);
    let got = Catalog::evaluate(&x, &p)
        .unwrap()
        .require("I_xy")
        .unwrap()
        .value;
    let rho2 = qx * qx + qy * qy;
    let want = p.beta * rho2 / (qx * qx) + p.gamma * rho2 / (qy * qy);
    assert!((got.re - want).abs() < 1e-12 * want);
}

#[test]
fn the_three_fourth_order_constants_sum_to_two_alpha_squared() {
    let p = SystemParams::kc4(1.7, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE);
    for x in sample(&p, 22, 100) {
        let c = Catalog::evaluate(&x, &p).unwrap();
        let terms: Vec<_> = ["J0", "J0_prime", "J0_dprime"]
            .iter()
            .map(|n| c.term(n).unwrap())
            .collect();
        let sum: C64 = terms.iter().map(|t| t.value).sum();
        let scale = terms.iter().map(|t| t.mag).fold(0.0, f64::max);
        assert!(rel(sum, C64::new(2.0 * p.alpha * p.alpha, 0.0), scale) < 1e-10);
    }
}

#[test]
fn raising_times_lowering_is_the_product_polynomial() {
    let k = |s: &str| s.parse::<RationalK>().unwrap();
    for p in [
        kc3_unit(),
        kc4_unit(),
        SystemParams::kc3(1.0, 2.0, 3.0, k("3"), k("5/3")),
    ] {
        for x in sample(&p, 23, 100) {
            let c = Catalog::evaluate(&x, &p).unwrap();
            let (jp, jm, p1) = (
                c.term("J_plus").unwrap(),
                c.term("J_minus").unwrap(),
                c.term("P1").unwrap(),
            );
            let lhs = jp.value * jm.value;
            assert!(rel(lhs, p1.value, jp.mag * jm.mag) < 1e-10);
        }
    }
}

#[test]
fn product_polynomial_vanishes_when_l2_equals_l3() {
    // θ1 = π/2 and p_θ1 = 0 give L2 = L3 in the three-parameter system.
    let p = kc3_unit();
    let x = PhasePoint::new(
        Chart::SphericalKc,
        [1.4, std::f64::consts::FRAC_PI_2, 0.7],
        [0.3, 0.0, 0.9],
    );
    let c = Catalog::evaluate(&x, &p).unwrap();
    let (l2, l3) = (
        c.require("L2").unwrap().value,
        c.require("L3").unwrap().value,
    );
    assert!((l2 - l3).norm() < 1e-12 * l2.norm());
    let p1 = c.term("P1").unwrap();
    assert!(p1.value.norm() <= 1e-12 * p1.mag.max(1.0));
}

#[test]
fn m3_is_conserved_only_without_the_z_barrier() {
    let free = SystemParams::kc4(1.0, 2.0, 3.0, 0.0, RationalK::ONE, RationalK::ONE);
    for x in sample(&free, 24, 100) {
        let c = Catalog::evaluate(&x, &free).unwrap();
        let t = bracket_term(&c.require("H").unwrap(), &c.require("M3").unwrap());
        assert!(t.value.norm() / t.mag.max(1.0) < 1e-10);
    }
    let barrier = kc4_unit();
    let worst = sample(&barrier, 24, 20)
        .iter()
        .map(|x| {
            let c = Catalog::evaluate(x, &barrier).unwrap();
            let t = bracket_term(&c.require("H").unwrap(), &c.require("M3").unwrap());
            t.value.norm() / t.mag.max(1.0)
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn primed_third_order_constant_is_minus_k1() {
    let p = kc4_unit();
    for x in sample(&p, 25, 100) {
        let c = Catalog::evaluate(&x, &p).unwrap();
        let b = bracket_term(
            &c.require("L3_prime").unwrap(),
            &c.require("K0_prime").unwrap(),
        );
        let k1 = c.term("K1").unwrap();
        let lhs = 0.25 * b.value;
        assert!(rel(lhs, -k1.value, 0.25 * b.mag) < 1e-9);
    }
}

#[test]
fn kepler_limit_conserves_the_runge_lenz_square() {
    // With β = γ = δ = 0 the Cartesian system is Kepler with H = p² + α/r,
    // whose scaled Runge-Lenz vector A = 2 p × L + α q/r has |A|² = α² + 4 H L².
    let p = SystemParams::kc4(-2.0, 0.0, 0.0, 0.0, RationalK::ONE, RationalK::ONE);
    for x in sample(&kc4_unit(), 26, 50) {
        let ([qx, qy, qz], m) = to_cartesian(&x);
        let y = PhasePoint::new(Chart::Cartesian, [qx, qy, qz], m);
        let c = superint::systems::core_jets(&y, &p).unwrap();
        let q = [qx, qy, qz];
        let l = [
            q[1] * m[2] - q[2] * m[1],
            q[2] * m[0] - q[0] * m[2],
            q[0] * m[1] - q[1] * m[0],
        ];
        let pxl = [
            m[1] * l[2] - m[2] * l[1],
            m[2] * l[0] - m[0] * l[2],
            m[0] * l[1] - m[1] * l[0],
        ];
        let r = (qx * qx + qy * qy + qz * qz).sqrt();
        let a: Vec<f64> = (0..3).map(|i| 2.0 * pxl[i] + p.alpha * q[i] / r).collect();
        let a2: f64 = a.iter().map(|v| v * v).sum();
        let want = p.alpha * p.alpha + 4.0 * c.h.value.re * c.l2.value.re;
        assert!((a2 - want).abs() < 1e-10 * a2.max(want).max(1.0));
    }
}
