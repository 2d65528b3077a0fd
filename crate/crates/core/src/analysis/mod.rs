//! Momentum degree, functional independence and the order-12 relation.

pub mod order12;
pub mod poly;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::systems::{PhasePoint, SystemParams};

pub use order12::{derive_order12_relation, Order12Config, Order12Relation};

/// Smallest magnification applied to the momenta before the λ sweep, so
/// the leading power dominates lower-order terms.
pub const DEGREE_MAGNIFICATION: f64 = 256.0;
/// Factor between successive magnifications when the leading coefficient
/// is small at the sampled point.
pub const DEGREE_MAGNIFICATION_STEP: f64 = 16.0;
pub const DEGREE_MAGNIFICATION_TRIES: usize = 4;
pub const DEGREE_LAMBDAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
/// Allowed distance of the fitted slope from an integer.
pub const DEGREE_SLACK: f64 = 0.01;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-6;

/// Least-squares slope of log|f(λ)| against log λ.
fn loglog_slope(vals: &[(f64, f64)]) -> f64 {
    let n = vals.len() as f64;
    let (sx, sy) = vals
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = vals.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    num / den
}

fn sweep_slope<F>(name: &str, x: &PhasePoint, mag: f64, f: &F) -> Result<f64>
where
    F: Fn(&PhasePoint) -> Result<f64>,
{
    let base = x.p.map(|v| v * mag);
    let mut pts = Vec::with_capacity(DEGREE_LAMBDAS.len());
    for lam in DEGREE_LAMBDAS {
        let y = PhasePoint::new(x.chart, x.q, base.map(|v| v * lam));
        let v = f(&y)?.abs();
        if !v.is_finite() {
            return Err(Error::NonFinite("observable at magnified momenta"));
        }
        if v == 0.0 {
            return Err(Error::NotPolynomial {
                name: name.into(),
                slope: f64::NAN,
            });
        }
        pts.push((lam.ln(), v.ln()));
    }
    Ok(loglog_slope(&pts))
}

/// Degree of `f` in the momenta at `x`, by λ sweeps on magnified momenta.
/// The magnification grows until two successive sweeps give the same
/// integer slope.
pub fn momentum_degree_of<F>(name: &str, x: &PhasePoint, f: F) -> Result<u32>
where
    F: Fn(&PhasePoint) -> Result<f64>,
{
    let mut mag = DEGREE_MAGNIFICATION;
    let mut prev: Option<f64> = None;
    let mut slope = f64::NAN;
    for _ in 0..DEGREE_MAGNIFICATION_TRIES {
        slope = sweep_slope(name, x, mag, &f)?;
        let d = slope.round();
        let integral = (slope - d).abs() <= DEGREE_SLACK && d >= 0.0;
        if integral && prev == Some(d) {
            return Ok(d as u32);
        }
        prev = integral.then_some(d);
        mag *= DEGREE_MAGNIFICATION_STEP;
    }
    Err(Error::NotPolynomial {
        name: name.into(),
        slope,
    })
}

/// Degree in the momenta of a catalog observable at `x`.
pub fn momentum_degree(name: &str, p: &SystemParams, x: &PhasePoint) -> Result<u32> {
    momentum_degree_of(name, x, |y| {
        Ok(Catalog::evaluate_lenient(y, p)?.require(name)?.value.norm())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Rank of the Jacobian of `names` in the phase coordinates. Columns and
/// then rows are scaled to unit norm first; diagonal scaling leaves the
/// rank unchanged and keeps steep angular terms near a pole from hiding
/// the momentum columns.
pub fn independence(names: &[&str], p: &SystemParams, x: &PhasePoint) -> Result<RankResult> {
    let cat = Catalog::evaluate(x, p)?;
    let mut m = DMatrix::<f64>::zeros(names.len(), 6);
    for (i, n) in names.iter().enumerate() {
        for (k, g) in cat.require(n)?.grad.iter().enumerate() {
            m[(i, k)] = g.re;
        }
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("Jacobian entry"));
    }
    // Max-abs first so the 2-norm cannot overflow for high-degree constants.
    for mut col in m.column_iter_mut() {
        let amax = col.amax();
        if amax > 0.0 {
            col /= amax;
            col /= col.norm();
        }
    }
    for mut row in m.row_iter_mut() {
        let amax = row.amax();
        if amax > 0.0 {
            row /= amax;
            let n = row.norm();
            row /= n;
        }
    }
    let sv: Vec<f64> = m.singular_values().iter().copied().collect();
    let top = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let rank = sv
        .iter()
        .filter(|&&s| top > 0.0 && s > RANK_CUTOFF * top)
        .count();
    Ok(RankResult {
        rank,
        singular_values: sv,
    })
}

pub fn independence_rank(names: &[&str], p: &SystemParams, x: &PhasePoint) -> Result<usize> {
    Ok(independence(names, p, x)?.rank)
}

/// Worst |Im S| / max(|S|, summand size, 1) of one observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealnessRow {
    pub observable: String,
    pub points: usize,
    pub max_imaginary_ratio: f64,
}

pub fn realness(names: &[&str], p: &SystemParams, pts: &[PhasePoint]) -> Result<Vec<RealnessRow>> {
    let mut worst = vec![0.0f64; names.len()];
    for x in pts {
        let c = Catalog::evaluate(x, p)?;
        for (w, n) in worst.iter_mut().zip(names) {
            let t = c.term(n)?;
            *w = w.max(t.value.im.abs() / t.scale().max(1.0));
        }
    }
    Ok(names
        .iter()
        .zip(worst)
        .map(|(n, w)| RealnessRow {
            observable: n.to_string(),
            points: pts.len(),
            max_imaginary_ratio: w,
        })
        .collect())
}
