//! Hamilton's equations with an adaptive Dormand–Prince 5(4) pair, and
//! drift of catalog constants along the resulting orbits.

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::systems::{core_jets, Chart, PhasePoint, SystemKind, SystemParams};

pub const TOL_MIN: f64 = 1e-13;
pub const TOL_MAX: f64 = 1e-6;
/// Orbit stops when a singular factor falls below this.
pub const SINGULARITY_FLOOR: f64 = 1e-3;
pub const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince coefficients.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitStatus {
    Completed,
    /// Stopped early near a pole or a singular potential term.
    SingularityApproach {
        t: f64,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub chart: Chart,
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub stats: IntegratorStats,
    pub status: OrbitStatus,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.states
            .last()
            .expect("trajectory holds its initial state")
    }

    pub fn completed(&self) -> bool {
        self.status == OrbitStatus::Completed
    }

    /// Rows of (t, q1, q2, q3, p1, p2, p3) for tabular export.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 7]> + '_ {
        self.times.iter().zip(&self.states).map(|(t, s)| {
            let a = s.to_array();
            [*t, a[0], a[1], a[2], a[3], a[4], a[5]]
        })
    }

    pub fn column_names(&self) -> [&'static str; 7] {
        match self.chart {
            Chart::Cartesian => ["t", "x", "y", "z", "px", "py", "pz"],
            Chart::SphericalOsc => ["t", "R", "theta1", "theta2", "pR", "ptheta1", "ptheta2"],
            Chart::SphericalKc => ["t", "r", "theta1", "theta2", "pr", "ptheta1", "ptheta2"],
        }
    }
}

/// (q̇, ṗ) = (∂H/∂p, -∂H/∂q) from the jet gradient of H.
pub fn hamilton_rhs(y: &[f64; 6], chart: Chart, p: &SystemParams) -> Result<[f64; 6]> {
    let g = core_jets(&PhasePoint::from_array(chart, *y), p)?.h.grad;
    Ok([g[3].re, g[4].re, g[5].re, -g[0].re, -g[1].re, -g[2].re])
}

/// Names the singular factor that has come too close to zero, if any.
/// Zero-strength potential terms are not singular and are skipped.
fn near_singularity(y: &[f64; 6], chart: Chart, p: &SystemParams) -> Option<String> {
    let f = SINGULARITY_FLOOR;
    let mut checks: Vec<(f64, &str)> = Vec::new();
    match chart {
        Chart::Cartesian => {
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            if p.alpha != 0.0 {
                checks.push((r, "r"));
            }
            if p.beta != 0.0 {
                checks.push((y[0].abs(), "x"));
            }
            if p.gamma != 0.0 {
                checks.push((y[1].abs(), "y"));
            }
            if p.d() != 0.0 {
                checks.push((y[2].abs(), "z"));
            }
        }
        _ => {
            let (c1, c2) = (p.k1.value() * y[1], p.k2.value() * y[2]);
            checks.push((y[0].abs(), "r"));
            checks.push((c1.sin().abs(), "sin(k1 theta1)"));
            if p.beta != 0.0 {
                checks.push((c2.cos().abs(), "cos(k2 theta2)"));
            }
            if p.gamma != 0.0 {
                checks.push((c2.sin().abs(), "sin(k2 theta2)"));
            }
            if p.d() != 0.0 && p.system == SystemKind::Kc4 {
                checks.push((c1.cos().abs(), "cos(k1 theta1)"));
            }
        }
    }
    checks
        .into_iter()
        .find(|(v, _)| *v < f)
        .map(|(v, n)| format!("{n} = {v:.3e}"))
}

fn axpy(y: &[f64; 6], h: f64, ks: &[[f64; 6]; 7], w: &[f64], n: usize) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + h * (0..n).map(|s| w[s] * ks[s][i]).sum::<f64>())
}

/// Integrates from `x0` over `[0, t_end]` with error control at `tol`
/// (absolute and relative). Every accepted step is recorded.
pub fn integrate(x0: &PhasePoint, p: &SystemParams, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(Error::Config(format!(
            "tolerance {tol:e} outside [{TOL_MIN:e}, {TOL_MAX:e}]"
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Config("duration must be positive and finite".into()));
    }
    let chart = x0.chart;
    let mut y = x0.to_array();
    let mut f0 = hamilton_rhs(&y, chart, p)?;
    let mut traj = Trajectory {
        chart,
        times: vec![0.0],
        states: vec![*x0],
        stats: IntegratorStats {
            steps: 0,
            rejected: 0,
            tol,
        },
        status: OrbitStatus::Completed,
    };
    if let Some(reason) = near_singularity(&y, chart, p) {
        traj.status = OrbitStatus::SingularityApproach { t: 0.0, reason };
        return Ok(traj);
    }
    let norm = |v: &[f64; 6]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut h = (0.01 * (1.0 + norm(&y)) / (1.0 + norm(&f0))).min(t_end);
    let mut t = 0.0;
    while t < t_end {
        if traj.stats.steps + traj.stats.rejected >= MAX_STEPS {
            return Err(Error::StepUnderflow(t));
        }
        h = h.min(t_end - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow(t));
        }
        let mut ks = [[0.0; 6]; 7];
        ks[0] = f0;
        let mut stage_err = None;
        for s in 1..7 {
            let ys = axpy(&y, h, &ks, &A[s], s);
            match hamilton_rhs(&ys, chart, p) {
                Ok(k) => ks[s] = k,
                Err(e) => {
                    stage_err = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = stage_err {
            if !e.is_point_failure() {
                return Err(e);
            }
            // A stage left the domain: shrink and retry.
            traj.stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        let y5 = axpy(&y, h, &ks, &B5, 7);
        let y4 = axpy(&y, h, &ks, &B4, 7);
        let err = (0..6)
            .map(|i| {
                let sc = tol * (1.0 + y[i].abs().max(y5[i].abs()));
                ((y5[i] - y4[i]) / sc).powi(2)
            })
            .sum::<f64>()
            .sqrt()
            / 6f64.sqrt();
        if !err.is_finite() {
            traj.stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        if err <= 1.0 {
            t += h;
            y = y5;
            // First-same-as-last: stage 7 is the derivative at the new point.
            f0 = ks[6];
            traj.stats.steps += 1;
            traj.times.push(t);
            traj.states.push(PhasePoint::from_array(chart, y));
            if let Some(reason) = near_singularity(&y, chart, p) {
                traj.status = OrbitStatus::SingularityApproach { t, reason };
                return Ok(traj);
            }
        } else {
            traj.stats.rejected += 1;
        }
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }
    Ok(traj)
}

/// Several independent orbits; parallel when the feature is on.
pub fn integrate_many(
    x0s: &[PhasePoint],
    p: &SystemParams,
    t_end: f64,
    tol: f64,
) -> Vec<Result<Trajectory>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        x0s.par_iter()
            .map(|x| integrate(x, p, t_end, tol))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        x0s.iter().map(|x| integrate(x, p, t_end, tol)).collect()
    }
}

/// max_t |S(x(t)) - S(x0)| / max(|S(x0)|, summand size of S(x0), 1).
pub fn conservation_drift(name: &str, traj: &Trajectory, p: &SystemParams) -> Result<f64> {
    let s0 = Catalog::evaluate(&traj.states[0], p)?.term(name)?;
    let scale = s0.scale().max(1.0);
    let mut worst = 0.0f64;
    for x in &traj.states[1..] {
        let v = Catalog::evaluate(x, p)?.require(name)?.value;
        worst = worst.max((v - s0.value).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::RationalK;

    #[test]
    fn rejects_tolerance_outside_range() {
        let p = SystemParams::kc3(1.0, 2.0, 3.0, RationalK::ONE, RationalK::ONE);
        let x = PhasePoint::new(Chart::SphericalKc, [2.0, 0.7, 0.6], [0.1, 0.2, 0.3]);
        assert!(integrate(&x, &p, 1.0, 1e-3).is_err());
        assert!(integrate(&x, &p, 1.0, 1e-15).is_err());
    }

    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

    #[test]
    fn dopri_weights_sum_to_one() {
        assert!((B5.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((B4.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for (s, row) in A.iter().enumerate() {
            assert!((row.iter().sum::<f64>() - C[s]).abs() < 1e-14);
        }
    }
}
