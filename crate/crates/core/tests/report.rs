//! Report assembly: determinism, pass/fail mapping and config errors.

use superint::identities::Tolerances;
use superint::report::{run, Command, Report, RunConfig, SCHEMA};
use superint::systems::{RationalK, SystemParams};

fn kc4() -> SystemParams {
    SystemParams::kc4(1.0, 2.0, 3.0, 4.0, RationalK::ONE, RationalK::ONE)
}

fn small(p: SystemParams) -> RunConfig {
    let mut cfg = RunConfig::new(p);
    cfg.points = 20;
    cfg.seed = 5;
    cfg
}

#[test]
fn same_seed_gives_identical_json() {
    let cfg = small(kc4());
    let a = run(Command::Verify, &cfg).unwrap().to_json();
    let b = run(Command::Verify, &cfg).unwrap().to_json();
    assert_eq!(a, b);
    let back: Report = serde_json::from_str(&a).unwrap();
    assert_eq!(back.schema, SCHEMA);
    assert!(back.pass);
    assert_eq!(back.exit_code(), 0);
}

#[test]
fn impossible_tolerance_fails_the_suite() {
    let mut cfg = small(kc4());
    cfg.tolerances = Tolerances {
        jet: 1e-30,
        ..Tolerances::default()
    };
    let r = run(Command::Verify, &cfg).unwrap();
    assert!(!r.pass);
    assert_eq!(r.exit_code(), 1);
    assert!(r.identities.iter().any(|s| !s.pass));
}

#[test]
fn orbit_report_lists_each_trajectory() {
    let mut cfg = small(kc4());
    cfg.orbits = 3;
    cfg.duration = 2.0;
    let r = run(Command::Orbit, &cfg).unwrap();
    assert_eq!(r.orbits.len(), 3);
    assert!(r.drift.iter().any(|d| d.observable == "H"));
    assert!(r.pass);
}

#[test]
fn wrong_system_for_the_command_is_a_config_error() {
    let osc = SystemParams::osc(4.0, 0.0, 0.0, 0.0, RationalK::ONE, RationalK::ONE);
    let e = run(Command::Verify, &small(osc)).unwrap_err();
    assert!(e.is_config_error(), "{e}");
    let e = run(Command::Stackel, &small(kc4())).unwrap_err();
    assert!(e.is_config_error(), "{e}");
}

#[test]
fn integrator_tolerance_out_of_range_is_a_config_error() {
    let mut cfg = small(kc4());
    cfg.integrator_tol = 1e-2;
    assert!(run(Command::Orbit, &cfg).unwrap_err().is_config_error());
}
