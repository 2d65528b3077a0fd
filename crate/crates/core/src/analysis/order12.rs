//! Numerical derivation of the order-12 functional relation among the six
//! Euclidean generators (H, L2, L3, K0, J0, J0').
//!
//! G = (J1² K1² - (J1 K1)²) / Q is formed from the closed forms of J1², K1²
//! and J1K1 as a function of free generator values. It is exactly quadratic
//! in (J0', J0), so its six coefficients are recovered pointwise from six
//! (J0', J0) probes and then fitted by least squares over monomials in
//! (H, L2, L3, K0).

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::poly::{eval_monomial, monomials, Exps, MonomialCoeff, Poly};
use crate::catalog::{reduced, Catalog};
use crate::error::{Error, Result};
use crate::numeric::Jet;
use crate::sampler::{Sampler, SamplerConfig};
use crate::systems::{SystemKind, SystemParams};

/// Degree caps in (H, L2, L3, K0) for A1..A6.
pub const DEGREE_CAPS: [u32; 6] = [2, 2, 2, 4, 4, 6];
/// In-sample fit threshold, relative to the largest fitted value.
pub const FIT_TOL: f64 = 1e-8;
/// Coefficient agreement for A1 = -4Q and for printed-vs-derived matching.
pub const COEFF_TOL: f64 = 1e-8;
/// Fitted coefficients below this fraction of the largest are dropped.
pub const PRUNE_REL: f64 = 1e-10;
/// Half-width of the box for off-shell generator values.
const BOX: f64 = 1.5;
/// Lower bound on |L2|, |L3| and |Q| at off-shell points.
const DENOM_FLOOR: f64 = 0.25;
/// (J0', J0) probes that pin down a quadratic form in two variables.
const PROBES: [(f64, f64); 6] = [
    (0.0, 0.0),
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, 1.0),
    (2.0, 0.0),
    (0.0, 2.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order12Config {
    pub seed: u64,
    /// Off-shell fit points.
    pub fit_points: usize,
    /// Off-shell holdout points.
    pub holdout_points: usize,
    /// Sampled phase-space points for the on-shell check.
    pub on_shell_points: usize,
    /// Threshold for the on-shell residual.
    pub relation_tol: f64,
}

impl Default for Order12Config {
    fn default() -> Self {
        Order12Config {
            seed: 0,
            fit_points: 600,
            holdout_points: 100,
            on_shell_points: 100,
            relation_tol: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub name: String,
    pub terms: Vec<MonomialCoeff>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialMismatch {
    pub monomial: String,
    pub derived: f64,
    pub printed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDiff {
    pub name: String,
    pub matches: bool,
    /// max |derived - printed| over monomials, relative to the largest printed coefficient.
    pub max_relative_diff: f64,
    pub mismatches: Vec<MonomialMismatch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order12Relation {
    pub coefficients: Vec<CoefficientTable>,
    /// Worst in-sample relative fit residual over A1..A6.
    pub fit_residual: f64,
    /// Coefficient-wise distance of the derived A1 from -4Q.
    pub a1_vs_minus_4q: f64,
    pub a1_matches: bool,
    /// Off-shell holdout: |G - fitted| / scale, maximum.
    pub holdout_residual: f64,
    /// Same points with every fitted coefficient zeroed.
    pub negative_control_residual: f64,
    /// Derived relation at sampled phase points, maximum relative residual.
    pub on_shell_residual: f64,
    /// Printed relation at the same phase points.
    pub printed_on_shell_residual: f64,
    pub printed_diff: Vec<CoefficientDiff>,
    pub pass: bool,
}

impl Order12Relation {
    pub fn polys(&self) -> Vec<Poly> {
        self.coefficients
            .iter()
            .map(|t| {
                let mut p = Poly::default();
                for m in &t.terms {
                    p.add_term(m.exponents, m.coefficient);
                }
                p
            })
            .collect()
    }
}

fn check_params(p: &SystemParams) -> Result<()> {
    p.validate()?;
    if !p.is_euclidean() {
        return Err(Error::Config(
            "the order-12 relation needs the four-parameter system with k1 = k2 = 1".into(),
        ));
    }
    let (b, g, d) = (p.beta, p.gamma, p.d());
    if b == 0.0 || g == 0.0 || d == 0.0 || b == g || g == d || b == d {
        return Err(Error::Config(
            "beta, gamma, delta must be nonzero and pairwise distinct".into(),
        ));
    }
    Ok(())
}

/// G at free generator values x = (H, L2, L3, K0), with (J0', J0).
pub fn g_value(p: &SystemParams, x: &[f64; 4], j0p: f64, j0: f64) -> Result<f64> {
    let [hj, l2j, l3j, _] = x.map(Jet::real);
    let (a2, b, g, d) = (p.alpha * p.alpha, p.beta, p.gamma, p.d());
    let q = reduced::q(l2j, l3j, p).re();
    let d1 = reduced::d1(l3j, p)?.re();
    let d2 = reduced::d2(l2j, p)?.re();
    let p1 = reduced::p1(hj, l2j, l3j, p)?.re();
    let p2 = reduced::p2(l2j, l3j, p)?.re();
    let [_, l2, l3, k0] = *x;
    let j1sq = -l2 * j0 * j0 - 2.0 * d1 * j0 + (4.0 * p1 - d1 * d1) / l2;
    let k1sq = -l3 * k0 * k0 - 2.0 * d2 * k0 + (4.0 * p2 - d2 * d2) / l3;
    let s = -j0 - 2.0 * j0p + 2.0 * a2;
    let j1k1 = 0.5 * (l2 + l3 - d) * j0 * k0
        + a2 * (l2 - 3.0 * l3 - d) * k0
        + (b - g) * (3.0 * l2 - l3 + d) * j0
        + 2.0 * a2 * (g - b) * (l2 + l3 - 5.0 * d)
        + s * q;
    Ok((j1sq * k1sq - j1k1 * j1k1) / q)
}

/// The six coefficient values at one (H, L2, L3, K0).
fn pointwise_coeffs(p: &SystemParams, x: &[f64; 4]) -> Result<[f64; 6]> {
    let mut m = Matrix6::zeros();
    let mut y = Vector6::zeros();
    for (i, (jp, j0)) in PROBES.iter().enumerate() {
        let row = [jp * jp, jp * j0, j0 * j0, *jp, *j0, 1.0];
        for (k, v) in row.iter().enumerate() {
            m[(i, k)] = *v;
        }
        y[i] = g_value(p, x, *jp, *j0)?;
    }
    let sol = m
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::Config("singular probe system".into()))?;
    Ok(std::array::from_fn(|k| sol[k]))
}

/// Value of A1 J0'² + A2 J0'J0 + A3 J0² + A4 J0' + A5 J0 + A6 and the sum
/// of the absolute sizes of its pieces.
pub fn relation_value(a: &[Poly], x: &[f64; 4], j0p: f64, j0: f64) -> (f64, f64) {
    let w = [j0p * j0p, j0p * j0, j0 * j0, j0p, j0, 1.0];
    let mut v = 0.0;
    let mut mag = 0.0;
    for (poly, wk) in a.iter().zip(w) {
        v += poly.eval(x) * wk;
        mag += poly.magnitude(x) * wk.abs();
    }
    (v, mag)
}

/// Q, L2 and L3 divide G; keep them away from zero so the pointwise
/// coefficients are not dominated by cancellation.
fn well_posed(p: &SystemParams, x: &[f64; 4]) -> bool {
    let d = p.d();
    let q = (x[2] - x[1] - d).powi(2) - 4.0 * d * x[1];
    x[1].abs() >= DENOM_FLOOR && x[2].abs() >= DENOM_FLOOR && q.abs() >= DENOM_FLOOR
}

fn draw_box(rng: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-BOX..BOX))
}

fn fit_one(points: &[[f64; 4]], values: &[f64], cap: u32) -> Result<(Poly, f64)> {
    let basis: Vec<Exps> = monomials(cap);
    let v = DMatrix::from_fn(points.len(), basis.len(), |i, j| {
        eval_monomial(&basis[j], &points[i])
    });
    let y = DVector::from_column_slice(values);
    let svd = v.clone().svd(true, true);
    let c = svd
        .solve(&y, 1e-13)
        .map_err(|e| Error::Config(e.to_string()))?;
    let fitted = &v * &c;
    let ymax = values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let res = (fitted - &y).amax() / ymax;
    let mut poly = Poly::default();
    for (e, ck) in basis.iter().zip(c.iter()) {
        poly.add_term(*e, *ck);
    }
    let floor = PRUNE_REL * poly.max_abs_coeff();
    Ok((poly.pruned(floor), res))
}

/// -4Q as a polynomial.
pub fn minus_four_q(p: &SystemParams) -> Poly {
    let d = p.d();
    let (l2, l3) = (Poly::var(1), Poly::var(2));
    let t = &(&l3 - &l2) + &Poly::constant(-d);
    let q = &(&t * &t) - &l2.scale(4.0 * d);
    q.scale(-4.0)
}

/// The typeset A2..A6 with a, b, c, d read as α, β, γ, δ.
pub fn printed_coefficients(p: &SystemParams) -> Vec<Poly> {
    let (a, b, c, d) = (p.alpha, p.beta, p.gamma, p.d());
    let a2 = a * a;
    let a4 = a2 * a2;
    // m(coeff, H, L2, L3, K0)
    let m = |k: f64, h: u32, l2: u32, l3: u32, k0: u32| Poly::mono(k, [h, l2, l3, k0]);
    let sum = |v: Vec<Poly>| v.into_iter().fold(Poly::default(), |acc, t| acc + t);
    let pa2 = sum(vec![
        m(8.0, 0, 1, 1, 0),
        m(2.0, 0, 1, 0, 1),
        m(2.0, 0, 0, 1, 1),
        m(-4.0, 0, 2, 0, 0),
        m(-4.0, 0, 0, 2, 0),
        m(4.0 * (-b + c + 2.0 * d), 0, 0, 1, 0),
        m(12.0 * b - 12.0 * c + 8.0 * d, 0, 1, 0, 0),
        m(-2.0 * d, 0, 0, 0, 1),
        m(-4.0 * c * d + 4.0 * b * d - 4.0 * d * d, 0, 0, 0, 0),
    ]);
    let pa3 = sum(vec![
        m(-2.0, 0, 1, 1, 0),
        m(1.0, 0, 1, 0, 1),
        m(-1.0, 0, 0, 2, 0),
        m(-1.0, 0, 2, 0, 0),
        m(1.0, 0, 0, 1, 1),
        m(-0.25, 0, 0, 0, 2),
        m(2.0 * (-b + c + d), 0, 0, 1, 0),
        m(2.0 * (7.0 * b + c + d), 0, 1, 0, 0),
        m(b - c - d, 0, 0, 0, 1),
        m(
            -b * b - c * c - d * d + 2.0 * b * d + 2.0 * b * c - 2.0 * c * d,
            0,
            0,
            0,
            0,
        ),
    ]);
    let pa4 = sum(vec![
        m(8.0 * a2, 0, 2, 0, 0),
        m(-12.0 * a2, 0, 0, 1, 1),
        m(8.0 * a2, 0, 0, 2, 0),
        m(-16.0 * a2, 0, 1, 1, 0),
        m(4.0 * a2, 0, 1, 0, 1),
        m(8.0 * a2 * (-b + c - 2.0 * d), 0, 1, 0, 0),
        m(-4.0 * a2 * d, 0, 0, 0, 1),
        m(8.0 * a2 * (-b + c - 2.0 * d), 0, 0, 1, 0),
        m(
            8.0 * a2 * d * d - 40.0 * a2 * c * d + 40.0 * a2 * b * d,
            0,
            0,
            0,
            0,
        ),
    ]);
    let pa5 = sum(vec![
        m(4.0 * a2, 0, 2, 0, 0),
        m(20.0 * a2, 0, 0, 2, 0),
        m(-a2, 0, 0, 0, 2),
        m(-8.0 * a2, 0, 1, 1, 0),
        m(-8.0 * a2, 0, 0, 1, 1),
        m(8.0 * a2 * (-2.0 * b + 2.0 * c - d), 0, 1, 0, 0),
        m(-8.0 * a2 * (4.0 * b + 4.0 * c + 3.0 * d), 0, 0, 1, 0),
        m(-4.0 * a2 * (b - c), 0, 0, 0, 1),
        m(
            4.0 * a2 * d * d + 12.0 * a2 * b * b + 16.0 * a2 * c * d - 24.0 * a2 * b * c
                + 12.0 * a2 * c * c
                + 48.0 * a2 * b * d,
            0,
            0,
            0,
            0,
        ),
    ]);
    // Readings of damaged glyphs: "H^22" as H^2, "L^2" as L2^2, "La^2d" as
    // a^2 d, "a^2(+c)b" as a^2 (b+c).
    let pa6 = sum(vec![
        m(-4.0 * a4, 0, 2, 0, 0),
        m(-36.0 * a4, 0, 0, 2, 0),
        m(128.0 * a2, 1, 2, 1, 0),
        m(-256.0 * a2, 1, 1, 2, 0),
        m(-512.0 * d, 2, 2, 1, 0),
        m(-512.0, 2, 2, 2, 0),
        m(256.0, 2, 3, 1, 0),
        m(-256.0 * a2 * d, 1, 1, 1, 0),
        m(-4.0 * a4 * d * d, 0, 0, 0, 0),
        m(8.0 * a4 * d, 0, 1, 0, 0),
        m(-24.0 * a4 * d, 0, 0, 1, 0),
        m(24.0 * a4, 0, 1, 1, 0),
        m(-36.0 * a4 * d * d, 0, 0, 0, 0),
        m(-36.0 * a4 * c * c, 0, 0, 0, 0),
        m(-24.0 * a4 * b, 0, 1, 0, 0),
        m(-40.0 * a4 * c, 0, 1, 0, 0),
        m(-256.0 * a2 * (b + c), 1, 2, 0, 0),
        m(-512.0 * (b + c), 2, 3, 0, 0),
        m(72.0 * a4 * b, 0, 0, 1, 0),
        m(56.0 * a4 * c, 0, 0, 1, 0),
        m(72.0 * a4 * b * c, 0, 0, 0, 0),
        m(-512.0 * (b * b + c * c), 2, 2, 0, 0),
        m(128.0 * a2, 1, 0, 3, 0),
        m(512.0 * a2 * (b + c), 1, 1, 1, 0),
        m(1024.0 * (b + c), 2, 2, 1, 0),
        m(-256.0 * a2 * (b * b + c * c), 1, 1, 0, 0),
        m(512.0 * a2 * b * c, 1, 1, 0, 0),
        m(1024.0 * b * c, 2, 2, 0, 0),
        m(-256.0 * a2 * (b + c), 1, 0, 2, 0),
        m(256.0, 2, 1, 3, 0),
        m(-512.0 * (b + c), 2, 1, 2, 0),
        m(128.0 * a2 * (b - c) * (b - c), 1, 0, 1, 0),
        m(256.0 * (b - c) * (b - c), 2, 1, 1, 0),
        m(-a4, 0, 0, 0, 2),
        m(24.0 * a4 * b * d, 0, 0, 0, 0),
        m(104.0 * a4 * c * d, 0, 0, 0, 0),
        m(12.0 * a4 * (c - b), 0, 0, 0, 1),
        m(-4.0 * a4, 0, 1, 0, 1),
        m(512.0 * a2 * b * d, 1, 1, 0, 0),
        m(128.0 * a2 * c, 1, 1, 0, 1),
        m(512.0 * a2 * b * c * d, 1, 0, 0, 0),
        m(128.0 * a2 * b * d, 1, 0, 0, 1),
        m(-128.0 * a2 * b, 1, 1, 0, 1),
        m(-128.0 * a2 * c * d, 1, 0, 0, 1),
        m(1024.0 * b * c * d, 2, 1, 0, 0),
        m(256.0 * d * (b - c), 2, 1, 0, 1),
        m(512.0 * a2 * c, 1, 1, 0, 0),
        m(1024.0 * d * (b + c), 2, 2, 0, 0),
        m(
            -256.0 * a2 * d * (b * b + c * c + b * c + c * d),
            1,
            0,
            0,
            0,
        ),
        m(256.0 * c, 2, 2, 0, 1),
        m(-512.0 * d * (b * b + c * c + b * d + c * d), 2, 1, 0, 0),
        m(-256.0 * b, 2, 2, 0, 1),
        m(4.0 * a4 * d, 0, 0, 0, 1),
        m(-256.0 * a2 * d, 1, 0, 2, 0),
        m(-512.0 * d, 2, 1, 2, 0),
        m(128.0 * a2 * d * d, 1, 0, 1, 0),
        m(256.0 * d * d, 2, 1, 1, 0),
        m(-32.0 * a2, 1, 0, 1, 2),
        m(-64.0, 2, 1, 1, 2),
        m(12.0 * a4, 0, 0, 1, 1),
        m(512.0 * a2 * d * (b + c), 1, 0, 1, 0),
        m(1024.0 * d * (b + c), 2, 1, 1, 0),
    ]);
    vec![minus_four_q(p), pa2, pa3, pa4, pa5, pa6]
}

fn diff(name: &str, derived: &Poly, printed: &Poly) -> CoefficientDiff {
    let scale = printed
        .max_abs_coeff()
        .max(derived.max_abs_coeff())
        .max(1.0);
    let mut keys: Vec<Exps> = derived
        .terms
        .keys()
        .chain(printed.terms.keys())
        .copied()
        .collect();
    keys.sort();
    keys.dedup();
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    for e in keys {
        let (dv, pv) = (derived.coeff(&e), printed.coeff(&e));
        let r = (dv - pv).abs() / scale;
        worst = worst.max(r);
        if r > COEFF_TOL.sqrt() {
            mismatches.push(MonomialMismatch {
                monomial: super::poly::monomial_name(&e),
                derived: dv,
                printed: pv,
            });
        }
    }
    CoefficientDiff {
        name: name.into(),
        matches: mismatches.is_empty(),
        max_relative_diff: worst,
        mismatches,
    }
}

/// Largest relative residual of relation `a` over sampled phase points.
fn on_shell(a: &[Poly], pts: &[[f64; 6]]) -> f64 {
    pts.iter()
        .map(|g| {
            let x = [g[0], g[1], g[2], g[3]];
            let (v, mag) = relation_value(a, &x, g[5], g[4]);
            v.abs() / mag.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// (H, L2, L3, K0, J0, J0') at admissible phase points.
pub fn generator_samples(p: &SystemParams, seed: u64, n: usize) -> Result<Vec<[f64; 6]>> {
    let pts = Sampler::new(p, SamplerConfig::with_seed(seed)).sample(n)?;
    pts.iter()
        .map(|x| {
            let c = Catalog::evaluate(x, p)?;
            let names = ["H", "L2", "L3", "K0", "J0", "J0_prime"];
            let mut out = [0.0; 6];
            for (o, n) in out.iter_mut().zip(names) {
                *o = c.require(n)?.re();
            }
            Ok(out)
        })
        .collect()
}

pub fn derive_order12_relation(p: &SystemParams, cfg: &Order12Config) -> Result<Order12Relation> {
    check_params(p)?;
    if p.system != SystemKind::Kc4 {
        return Err(Error::WrongK);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pts = Vec::with_capacity(cfg.fit_points);
    let mut vals: Vec<[f64; 6]> = Vec::with_capacity(cfg.fit_points);
    while pts.len() < cfg.fit_points {
        let x = draw_box(&mut rng);
        if !well_posed(p, &x) {
            continue;
        }
        let Ok(a) = pointwise_coeffs(p, &x) else {
            continue;
        };
        if a.iter().any(|v| !v.is_finite()) {
            continue;
        }
        pts.push(x);
        vals.push(a);
    }
    let mut polys = Vec::with_capacity(6);
    let mut fit_residual = 0.0f64;
    for (j, cap) in DEGREE_CAPS.iter().enumerate() {
        let col: Vec<f64> = vals.iter().map(|a| a[j]).collect();
        let (poly, res) = fit_one(&pts, &col, *cap)?;
        fit_residual = fit_residual.max(res);
        polys.push(poly);
    }
    if fit_residual.is_nan() || fit_residual >= FIT_TOL {
        return Err(Error::FitFailure {
            residual: fit_residual,
            threshold: FIT_TOL,
        });
    }

    let printed = printed_coefficients(p);
    let a1 = diff("A1", &polys[0], &printed[0]);

    let mut holdout = 0.0f64;
    let mut control = 0.0f64;
    let mut kept = 0;
    while kept < cfg.holdout_points {
        let x = draw_box(&mut rng);
        let (j0p, j0) = (rng.random_range(-BOX..BOX), rng.random_range(-BOX..BOX));
        if !well_posed(p, &x) {
            continue;
        }
        let Ok(g) = g_value(p, &x, j0p, j0) else {
            continue;
        };
        if !g.is_finite() {
            continue;
        }
        let (v, mag) = relation_value(&polys, &x, j0p, j0);
        let scale = mag.max(g.abs()).max(1.0);
        holdout = holdout.max((g - v).abs() / scale);
        control = control.max(g.abs() / scale);
        kept += 1;
    }

    let shell = generator_samples(p, cfg.seed ^ 0x5eed, cfg.on_shell_points)?;
    let on_shell_residual = on_shell(&polys, &shell);
    let printed_on_shell_residual = on_shell(&printed, &shell);

    let names = ["A1", "A2", "A3", "A4", "A5", "A6"];
    let printed_diff = (1..6)
        .map(|j| diff(names[j], &polys[j], &printed[j]))
        .collect();
    let coefficients = polys
        .iter()
        .zip(names)
        .map(|(p, n)| CoefficientTable {
            name: n.into(),
            terms: p.table(),
        })
        .collect();
    let pass = a1.max_relative_diff < COEFF_TOL
        && holdout < FIT_TOL
        && control > FIT_TOL
        && on_shell_residual < cfg.relation_tol;
    Ok(Order12Relation {
        coefficients,
        fit_residual,
        a1_vs_minus_4q: a1.max_relative_diff,
        a1_matches: a1.max_relative_diff < COEFF_TOL,
        holdout_residual: holdout,
        negative_control_residual: control,
        on_shell_residual,
        printed_on_shell_residual,
        printed_diff,
        pass,
    })
}
