//! Randomised invariants of the bracket engine and the catalog.

use proptest::prelude::*;
use superint::catalog::{reduced, Catalog};
use superint::numeric::{bracket, bracket_term, fd_gradient, lift, nested_bracket, Jet, C64};
use superint::sampler::{Sampler, SamplerConfig};
use superint::systems::{
    cartesian_to_spherical, spherical_to_cartesian, Chart, PhasePoint, RationalK, SystemKind,
    SystemParams,
};

const CASES: u32 = 48;

fn k(s: &str) -> RationalK {
    s.parse().unwrap()
}

fn systems() -> Vec<SystemParams> {
    vec![
        SystemParams::kc3(1.0, 2.0, 3.0, k("1"), k("1")),
        SystemParams::kc3(0.7, 1.3, 2.2, k("3"), k("5/3")),
        SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k("1"), k("1")),
        SystemParams::kc4(-1.5, 0.8, 2.5, 1.1, k("1/3"), k("1")),
    ]
}

fn point(p: &SystemParams, seed: u64) -> PhasePoint {
    Sampler::new(p, SamplerConfig::with_seed(seed))
        .sample(1)
        .unwrap()[0]
}

fn rel(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(a.norm()).max(b.norm()).max(1.0)
}

fn symmetry_names(p: &SystemParams) -> Vec<&'static str> {
    let mut v = vec![
        "J_plus", "J_minus", "K_plus", "K_minus", "J1", "J2", "K1", "K2", "K0", "P1", "P2",
    ];
    if p.system == SystemKind::Kc4 {
        v.push("J0");
    }
    if p.is_euclidean() {
        v.extend([
            "I_xy",
            "I_xz",
            "I_yz",
            "J0_prime",
            "J0_dprime",
            "L3_prime",
            "K0_prime",
            "S_closure",
        ]);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn bracket_is_exactly_antisymmetric(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        for (a, b) in [("J1", "K1"), ("L2", "K2"), ("H", "J2")] {
            let (fa, fb) = (c.require(a).unwrap(), c.require(b).unwrap());
            prop_assert_eq!(bracket(&fa, &fb), -bracket(&fb, &fa));
        }
    }

    #[test]
    fn leibniz_rule(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        let (f, g, h) = (c.require("J1").unwrap(), c.require("K1").unwrap(), c.require("L3").unwrap());
        let lhs = bracket_term(&f, &(g * h));
        let (fg, fh) = (bracket_term(&f, &g), bracket_term(&f, &h));
        let rhs = fg.value * h.value + g.value * fh.value;
        let scale = (fg.mag * h.value.norm() + g.value.norm() * fh.mag).max(lhs.mag);
        prop_assert!(rel(lhs.value, rhs, scale) < 1e-10);
    }

    #[test]
    fn jacobi_identity(seed in 0u64..10_000) {
        let p = systems()[2];
        let x = point(&p, seed);
        let c = Catalog::evaluate(&x, &p).unwrap();
        let arr = x.to_array();
        let inner = |u: &'static str, v: &'static str| {
            move |y: &[f64; 6]| {
                let cy = Catalog::evaluate(&x.with_array(*y), &p)?;
                Ok(bracket(&cy.require(u)?, &cy.require(v)?))
            }
        };
        let (a, b, h) = ("J0", "K0", "L2");
        let t1 = nested_bracket(&c.require(a).unwrap(), inner(b, h), &arr).unwrap();
        let t2 = nested_bracket(&c.require(b).unwrap(), inner(h, a), &arr).unwrap();
        let t3 = nested_bracket(&c.require(h).unwrap(), inner(a, b), &arr).unwrap();
        let scale = t1.mag.max(t2.mag).max(t3.mag);
        prop_assert!(rel(t1.value + t2.value + t3.value, C64::new(0.0, 0.0), scale) < 1e-6);
    }

    #[test]
    fn jet_gradient_matches_finite_differences(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let x = point(&p, seed);
        let c = Catalog::evaluate(&x, &p).unwrap();
        for name in ["H", "J1", "K0"] {
            let exact = c.require(name).unwrap().grad;
            let approx = fd_gradient(
                |y: &[f64; 6]| Ok(Catalog::evaluate(&x.with_array(*y), &p)?.require(name)?.value),
                &x.to_array(),
            )
            .unwrap();
            let scale = exact.iter().map(|g| g.norm()).fold(0.0, f64::max);
            for (e, a) in exact.iter().zip(&approx) {
                prop_assert!(rel(*e, *a, scale) < 1e-6, "{name}: {e} vs {a}");
            }
        }
    }

    #[test]
    fn separation_constants_are_in_involution(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        for (a, b) in [("H", "L2"), ("H", "L3"), ("L2", "L3")] {
            let t = bracket_term(&c.require(a).unwrap(), &c.require(b).unwrap());
            prop_assert!(t.value.norm() / t.mag.max(1.0) < 1e-12);
        }
    }

    #[test]
    fn symmetries_commute_with_hamiltonian(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        let h = c.require("H").unwrap();
        for name in symmetry_names(&p) {
            let t = bracket_term(&h, &c.require(name).unwrap());
            prop_assert!(t.value.norm() / t.mag.max(1.0) < 1e-9, "{name}: {:e}", t.value.norm() / t.mag.max(1.0));
        }
    }

    #[test]
    fn polynomial_constants_are_real(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        for name in ["J1", "J2", "K1", "K2", "K0"] {
            let t = c.term(name).unwrap();
            prop_assert!(t.value.im.abs() / t.mag.max(1.0) < 1e-9);
        }
    }

    #[test]
    fn block_products_equal_squared_norms(seed in 0u64..10_000, sys in 0usize..4) {
        let p = systems()[sys];
        let c = Catalog::evaluate(&point(&p, seed), &p).unwrap();
        for (x, xb, u) in [("X1", "X1_bar", "U1"), ("X2", "X2_bar", "U2"), ("Y1", "Y1_bar", "S1"), ("Y2", "Y2_bar", "S2")] {
            let (a, b, n) = (c.require(x).unwrap().value, c.require(xb).unwrap().value, c.require(u).unwrap().value);
            prop_assert!(rel(a * b, n * n, a.norm() * b.norm()) < 1e-10, "{x}");
        }
    }

    #[test]
    fn catalog_is_chart_covariant(seed in 0u64..10_000) {
        let p = systems()[2];
        let sph = point(&p, seed);
        let cart = spherical_to_cartesian(&sph).unwrap();
        let (cs, cc) = (Catalog::evaluate(&sph, &p).unwrap(), Catalog::evaluate(&cart, &p).unwrap());
        for name in ["H", "L2", "L3", "J1", "K0", "J0", "J0_prime", "I_xz"] {
            let (a, b) = (cs.term(name).unwrap(), cc.term(name).unwrap());
            prop_assert!(rel(a.value, b.value, a.mag) < 1e-10, "{name}");
        }
        // The change of chart is canonical, so brackets agree as well.
        let b_s = bracket_term(&cs.require("J0").unwrap(), &cs.require("K0").unwrap());
        let b_c = bracket_term(&cc.require("J0").unwrap(), &cc.require("K0").unwrap());
        prop_assert!(rel(b_s.value, b_c.value, b_s.mag.max(b_c.mag)) < 1e-9);
        let back = cartesian_to_spherical(&cart).unwrap();
        for i in 0..3 {
            prop_assert!((back.q[i] - sph.q[i]).abs() < 1e-12 * sph.q[i].abs().max(1.0));
            prop_assert!((back.p[i] - sph.p[i]).abs() < 1e-12 * sph.p[i].abs().max(1.0));
        }
    }

    #[test]
    fn j0_prime_is_j0_under_x_z_transposition(seed in 0u64..10_000) {
        let p = systems()[2];
        let x = spherical_to_cartesian(&point(&p, seed)).unwrap();
        let swapped = PhasePoint::new(Chart::Cartesian, [x.q[2], x.q[1], x.q[0]], [x.p[2], x.p[1], x.p[0]]);
        let q = SystemParams::kc4(p.alpha, p.d(), p.gamma, p.beta, RationalK::ONE, RationalK::ONE);
        let a = Catalog::evaluate(&x, &p).unwrap().term("J0_prime").unwrap();
        let Ok(cat) = Catalog::evaluate(&swapped, &q) else { return Ok(()) };
        let b = cat.term("J0").unwrap();
        prop_assert!(rel(a.value, b.value, a.mag.max(b.mag)) < 1e-10);
    }

    #[test]
    fn reduced_derivatives_match_finite_differences(
        h in -3.0f64..3.0, l2 in 1.0f64..20.0, l3 in 0.5f64..10.0, sys in 0usize..4,
    ) {
        let p = systems()[sys];
        let c = |v: f64| Jet::real(v);
        let step = 1e-6;
        let Ok(d) = reduced::dp1_dl2(c(h), c(l2), c(l3), &p) else { return Ok(()) };
        let (Ok(up), Ok(dn)) = (reduced::p1(c(h), c(l2 + step), c(l3), &p), reduced::p1(c(h), c(l2 - step), c(l3), &p)) else {
            return Ok(());
        };
        let fd = (up.value - dn.value) / (2.0 * step);
        let scale = up.value.norm().max(dn.value.norm()) / l2;
        prop_assert!(rel(d.value, fd, scale) < 1e-6, "{} vs {}", d.value, fd);

        let Ok(d) = reduced::dp2_dl3(c(l2), c(l3), &p) else { return Ok(()) };
        let up = reduced::p2(c(l2), c(l3 + step), &p).unwrap();
        let dn = reduced::p2(c(l2), c(l3 - step), &p).unwrap();
        let fd = (up.value - dn.value) / (2.0 * step);
        let scale = up.value.norm().max(dn.value.norm()) / l3;
        prop_assert!(rel(d.value, fd, scale) < 1e-6, "{} vs {}", d.value, fd);
    }
}

#[test]
fn lifted_coordinates_form_a_canonical_basis() {
    let v = lift(&[1.3, 0.4, 0.9, -0.2, 0.5, 0.7]);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert_eq!(bracket(&v[i], &v[j + 3]).re, want);
            assert_eq!(bracket(&v[i], &v[j]).re, 0.0);
            assert_eq!(bracket(&v[i + 3], &v[j + 3]).re, 0.0);
        }
    }
}
