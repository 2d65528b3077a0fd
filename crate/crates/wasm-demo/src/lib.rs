//! Browser bindings. Every entry point takes plain numbers and strings and
//! returns a JSON report, or a JSON object with an `error` field.

use serde::Serialize;
use superint::report::{self, Command, RunConfig};
use superint::systems::{RationalK, SystemKind, SystemParams};
use wasm_bindgen::prelude::*;

/// Largest sample the page may request; keeps the tab responsive.
const MAX_POINTS: usize = 500;
const MAX_ORBITS: usize = 20;

#[derive(Serialize)]
struct Failure {
    error: String,
    config_error: bool,
}

fn fail(e: superint::error::Error) -> String {
    serde_json::to_string(&Failure {
        config_error: e.is_config_error(),
        error: e.to_string(),
    })
    .expect("failure serialises")
}

fn kc_params(
    system: &str,
    strengths: &[f64],
    k1: &str,
    k2: &str,
) -> superint::error::Result<SystemParams> {
    let (k1, k2): (RationalK, RationalK) = (k1.parse()?, k2.parse()?);
    let s = |i: usize| strengths.get(i).copied().unwrap_or(0.0);
    match system.parse::<SystemKind>()? {
        SystemKind::Kc3 => Ok(SystemParams::kc3(s(0), s(1), s(2), k1, k2)),
        SystemKind::Kc4 => Ok(SystemParams::kc4(s(0), s(1), s(2), s(3), k1, k2)),
        SystemKind::Osc => Err(superint::error::Error::Config("pick kc3 or kc4".into())),
    }
}

fn run(command: Command, cfg: superint::error::Result<RunConfig>) -> String {
    match cfg.and_then(|c| report::run(command, &c)) {
        Ok(r) => r.to_json(),
        Err(e) => fail(e),
    }
}

/// Identity suite at `points` sampled points. `strengths` holds α, β, γ
/// and, for kc4, δ.
#[wasm_bindgen]
pub fn verify_json(
    system: &str,
    strengths: &[f64],
    k1: &str,
    k2: &str,
    points: usize,
    seed: u32,
) -> String {
    let cfg = kc_params(system, strengths, k1, k2).map(|p| {
        let mut c = RunConfig::new(p);
        c.points = points.clamp(1, MAX_POINTS);
        c.seed = seed.into();
        c
    });
    run(Command::Verify, cfg)
}

/// Integrates `orbits` trajectories for `duration` and reports drift.
#[wasm_bindgen]
pub fn orbit_json(
    system: &str,
    strengths: &[f64],
    k1: &str,
    k2: &str,
    orbits: usize,
    duration: f64,
    seed: u32,
) -> String {
    let cfg = kc_params(system, strengths, k1, k2).map(|p| {
        let mut c = RunConfig::new(p);
        c.orbits = orbits.clamp(1, MAX_ORBITS);
        c.duration = duration;
        c.seed = seed.into();
        c
    });
    run(Command::Orbit, cfg)
}

/// Caged oscillator at energy `e_prime` mapped to the four-parameter
/// system. `strengths` holds α′, β′, γ′, δ′.
#[wasm_bindgen]
pub fn stackel_json(strengths: &[f64], j1: &str, j2: &str, e_prime: f64, points: usize) -> String {
    let cfg = (|| {
        let (j1, j2): (RationalK, RationalK) = (j1.parse()?, j2.parse()?);
        let s = |i: usize| strengths.get(i).copied().unwrap_or(0.0);
        let mut c = RunConfig::new(SystemParams::osc(s(0), s(1), s(2), s(3), j1, j2));
        c.points = points.clamp(1, MAX_POINTS);
        c.e_prime = Some(e_prime);
        Ok(c)
    })();
    run(Command::Stackel, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_round_trips_through_json() {
        let v: serde_json::Value =
            serde_json::from_str(&verify_json("kc3", &[1.0, 2.0, 3.0], "1", "1", 10, 0)).unwrap();
        assert_eq!(v["pass"], true);
    }

    #[test]
    fn bad_input_reports_a_config_error() {
        let v: serde_json::Value =
            serde_json::from_str(&verify_json("kc3", &[1.0], "2", "1", 10, 0)).unwrap();
        assert_eq!(v["config_error"], true);
    }

    #[test]
    fn stackel_isotropic_case() {
        let v: serde_json::Value =
            serde_json::from_str(&stackel_json(&[4.0], "2", "2", 8.0, 20)).unwrap();
        assert_eq!(v["stackel"]["energy"], -1.0);
    }
}
