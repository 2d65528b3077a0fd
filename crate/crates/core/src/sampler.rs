//! Seeded draws of admissible phase-space points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::systems::{Chart, PhasePoint, SystemKind, SystemParams};

/// Floor on |sin| and |cos| of both scaled angles at sampled points.
pub const ANGLE_FLOOR: f64 = 0.05;
/// Relative floor on |L2 - L3|.
pub const SPLIT_FLOOR: f64 = 1e-3;
/// Relative floor on |Q| against (L2 + L3 + |δ|)².
pub const Q_FLOOR: f64 = 1e-3;
/// Draw budget per requested point.
pub const DRAWS_PER_POINT: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    /// Momenta are uniform in [-momentum, momentum].
    pub momentum: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            r_min: 0.5,
            r_max: 5.0,
            momentum: 2.0,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig {
            seed,
            ..Self::default()
        }
    }
}

/// Checks every floor that keeps catalog formulas well conditioned, then
/// evaluates the catalog once to catch remaining point failures.
pub fn check_admissible(x: &PhasePoint, p: &SystemParams) -> Result<()> {
    let ok = |cond: bool, msg: &str| {
        if cond {
            Ok(())
        } else {
            Err(Error::InadmissiblePoint(msg.to_string()))
        }
    };
    let c = Catalog::evaluate(x, p)?;
    let t = c.sph.map(|j| j.value.re);
    ok(t[0] > 0.0, "r must be positive")?;
    let c1 = p.k1.value() * t[1];
    let c2 = p.k2.value() * t[2];
    for v in [c1.sin(), c1.cos(), c2.sin(), c2.cos()] {
        ok(v.abs() >= ANGLE_FLOOR, "angle factor below floor")?;
    }
    if !p.is_kc() {
        return Ok(());
    }
    let l2 = c.core.l2.value.re;
    let l3 = c.core.l3.value.re;
    ok(l2 > 0.0 && l3 > 0.0, "L2 and L3 must be positive")?;
    ok(
        (l2 - l3).abs() >= SPLIT_FLOOR * (l2.abs() + l3.abs()),
        "L2 too close to L3",
    )?;
    if p.system == SystemKind::Kc4 {
        let d = p.d();
        let q = (l3 - l2 - d).powi(2) - 4.0 * d * l2;
        ok(
            q.abs() >= Q_FLOOR * (l2 + l3 + d.abs()).powi(2),
            "Q too close to zero",
        )?;
    }
    Ok(())
}

pub struct Sampler {
    rng: ChaCha8Rng,
    cfg: SamplerConfig,
    params: SystemParams,
    chart: Chart,
}

impl Sampler {
    pub fn new(params: &SystemParams, cfg: SamplerConfig) -> Self {
        let chart = match params.system {
            SystemKind::Osc => Chart::SphericalOsc,
            _ => Chart::SphericalKc,
        };
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            params: *params,
            chart,
        }
    }

    /// Sample in the Cartesian chart instead (k1 = k2 = 1 systems only).
    pub fn cartesian(mut self) -> Result<Self> {
        if !self.params.has_cartesian_form() {
            return Err(Error::ChartMismatch(
                "Cartesian sampling needs k1 = k2 = 1".into(),
            ));
        }
        self.chart = Chart::Cartesian;
        Ok(self)
    }

    /// One uniform draw in the spherical chart domain; no floors applied.
    pub fn draw_raw(&mut self) -> PhasePoint {
        let (lo, hi) = match self.params.system {
            // r = R², so R ranges over the square roots.
            SystemKind::Osc => (self.cfg.r_min.sqrt(), self.cfg.r_max.sqrt()),
            _ => (self.cfg.r_min, self.cfg.r_max),
        };
        let r = self.rng.random_range(lo..hi);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let t1 = self.rng.random_range(0.0..half_pi / self.params.k1.value());
        let t2 = self.rng.random_range(0.0..half_pi / self.params.k2.value());
        let m = self.cfg.momentum;
        let mom: [f64; 3] = std::array::from_fn(|_| self.rng.random_range(-m..m));
        let chart = match self.params.system {
            SystemKind::Osc => Chart::SphericalOsc,
            _ => Chart::SphericalKc,
        };
        PhasePoint::new(chart, [r, t1, t2], mom)
    }

    fn convert(&self, x: PhasePoint) -> Result<PhasePoint> {
        match self.chart {
            Chart::Cartesian => crate::systems::spherical_to_cartesian(&x),
            _ => Ok(x),
        }
    }

    pub fn next_admissible(&mut self, budget: &mut usize) -> Result<PhasePoint> {
        while *budget > 0 {
            *budget -= 1;
            let x = self.draw_raw();
            let Ok(x) = self.convert(x) else { continue };
            match check_admissible(&x, &self.params) {
                Ok(()) => return Ok(x),
                Err(e) if e.is_point_failure() => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SamplerExhausted(0))
    }

    /// `n` admissible points within `DRAWS_PER_POINT * n` draws.
    pub fn sample(&mut self, n: usize) -> Result<Vec<PhasePoint>> {
        if n == 0 {
            return Err(Error::Config("number of points must be at least 1".into()));
        }
        let total = DRAWS_PER_POINT * n;
        let mut budget = total;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            match self.next_admissible(&mut budget) {
                Ok(x) => out.push(x),
                Err(Error::SamplerExhausted(_)) => return Err(Error::SamplerExhausted(total)),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

/// Oscillator points on the shell H' = E': angles and angular momenta are
/// drawn as usual and p_R is solved for, with a random sign.
pub fn sample_energy_shell(
    osc: &SystemParams,
    e_prime: f64,
    cfg: SamplerConfig,
    n: usize,
) -> Result<Vec<PhasePoint>> {
    if osc.system != SystemKind::Osc {
        return Err(Error::ChartMismatch(
            "energy-shell sampling needs the oscillator".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Config("number of points must be at least 1".into()));
    }
    let mut s = Sampler::new(osc, cfg);
    let mut out = Vec::with_capacity(n);
    for _ in 0..DRAWS_PER_POINT * n {
        if out.len() == n {
            break;
        }
        let mut x = s.draw_raw();
        x.p[0] = 0.0;
        let Ok(rest) = crate::systems::eval_core(crate::systems::CoreSym::H, &x, osc) else {
            continue;
        };
        let pr2 = e_prime - rest.value.re;
        if pr2 <= 0.0 {
            continue;
        }
        let sign = if s.rng.random_bool(0.5) { 1.0 } else { -1.0 };
        x.p[0] = sign * pr2.sqrt();
        if check_admissible(&x, osc).is_ok() {
            out.push(x);
        }
    }
    if out.len() < n {
        return Err(Error::SamplerExhausted(DRAWS_PER_POINT * n));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::RationalK;

    #[test]
    fn deterministic_under_seed() {
        let p = SystemParams::kc4(1.0, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE);
        let a = Sampler::new(&p, SamplerConfig::with_seed(7))
            .sample(5)
            .unwrap();
        let b = Sampler::new(&p, SamplerConfig::with_seed(7))
            .sample(5)
            .unwrap();
        assert_eq!(a, b);
        let c = Sampler::new(&p, SamplerConfig::with_seed(8))
            .sample(5)
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_points_is_an_error() {
        let p = SystemParams::kc3(1.0, 2.0, 3.0, RationalK::ONE, RationalK::ONE);
        assert!(Sampler::new(&p, SamplerConfig::default())
            .sample(0)
            .is_err());
    }

    #[test]
    fn impossible_floor_exhausts() {
        // Strongly negative β, γ with small momenta keep L3 negative.
        let p = SystemParams::kc3(1.0, -50.0, -50.0, RationalK::ONE, RationalK::ONE);
        let cfg = SamplerConfig {
            momentum: 0.1,
            ..SamplerConfig::default()
        };
        let err = Sampler::new(&p, cfg).sample(2).unwrap_err();
        assert_eq!(err, Error::SamplerExhausted(2000));
    }
}
