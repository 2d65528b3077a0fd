//! End-to-end runs of the binary: exit codes, report shape, file output.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn superint(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_superint"));
    c.args(args);
    for v in [
        "SUPERINT_TOL_JET",
        "SUPERINT_TOL_NESTED",
        "SUPERINT_TOL_RELATION",
    ] {
        c.env_remove(v);
    }
    c.envs(env.iter().copied());
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("superint-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn verify_passes_with_defaults() {
    let o = superint(&["verify", "--points", "20"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["schema"], "superint-report/1");
    assert_eq!(r["command"], "verify");
    assert_eq!(r["pass"], true);
    assert!(r["identities"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn unknown_system_is_a_usage_error() {
    assert_eq!(code(&superint(&["verify", "--system", "kc9"], &[])), 2);
}

#[test]
fn even_numerator_is_a_usage_error() {
    assert_eq!(code(&superint(&["verify", "--k1", "2"], &[])), 2);
}

#[test]
fn impossible_tolerance_from_the_environment_fails_the_suite() {
    let o = superint(
        &["verify", "--points", "10"],
        &[("SUPERINT_TOL_JET", "1e-30")],
    );
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn negative_tolerance_is_a_usage_error() {
    assert_eq!(
        code(&superint(&["verify"], &[("SUPERINT_TOL_JET", "-1")])),
        2
    );
}

#[test]
fn stackel_maps_the_isotropic_oscillator() {
    let o = superint(
        &[
            "stackel",
            "--Eprime",
            "8",
            "--alphaprime",
            "4",
            "--j1",
            "2",
            "--j2",
            "2",
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = &json(&o)["stackel"];
    assert_eq!(s["energy"], -1.0);
    assert_eq!(s["kc_params"]["alpha"], -2.0);
    assert_eq!(s["kc_params"]["k1"], "1/1");
    assert_eq!(s["kc_params"]["k2"], "1/1");
}

#[test]
fn csv_report_has_a_header() {
    let o = superint(&["verify", "--points", "10", "--format", "csv"], &[]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("id,group,tier,points,max_residual"));
    assert!(text.lines().count() > 10);
}

#[test]
fn trajectories_are_written_one_file_per_orbit() {
    let dir = scratch("traj");
    let o = superint(
        &[
            "orbit",
            "--orbits",
            "2",
            "--duration",
            "1",
            "--trajectory-csv",
            dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for i in 0..2 {
        let text = std::fs::read_to_string(dir.join(format!("orbit_{i:03}.csv"))).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "t,r,theta1,theta2,pr,ptheta1,ptheta2"
        );
        assert!(text.lines().count() > 2);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn report_goes_to_a_file_when_asked() {
    let dir = scratch("out");
    let path = dir.join("report.json");
    let o = superint(
        &[
            "degree",
            "--points",
            "2",
            "--output",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "degree");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn catalog_prints_json() {
    let o = superint(&["catalog"], &[]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v.as_array().is_some_and(|a| a.len() > 10));
}
