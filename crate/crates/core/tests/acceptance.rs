//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use superint::analysis::{self, derive_order12_relation, momentum_degree, Order12Config};
use superint::catalog::Catalog;
use superint::error::Result;
use superint::identities::{builtin_identities, check_at_points, Group, Tolerances};
use superint::numeric::{bracket, bracket_term, nested_bracket, C64};
use superint::report::{self, realness_names, Command, RunConfig};
use superint::sampler::{sample_energy_shell, Sampler, SamplerConfig};
use superint::systems::{
    stackel_map, stackel_params, PhasePoint, RationalK, SystemKind, SystemParams,
};

const K_GRID: [(&str, &str); 4] = [("1", "1"), ("1/3", "1"), ("3", "5/3"), ("5/3", "3/5")];
const SUITE_POINTS: usize = 100;
const SUITE_BUDGET: Duration = Duration::from_secs(60);
const REALNESS_POINTS: usize = 1000;
const REALNESS_TOL: f64 = 1e-9;
const RANK_POINTS: usize = 50;
const A1_TOL: f64 = 1e-8;
const LEIBNIZ_TOL: f64 = 1e-10;
const JACOBI_TOL: f64 = 1e-6;
const AXIOM_POINTS: usize = 100;

fn k(s: &str) -> RationalK {
    s.parse().expect("grid entry parses")
}

fn kc3(k1: &str, k2: &str) -> SystemParams {
    SystemParams::kc3(1.0, 2.0, 3.0, k(k1), k(k2))
}

fn kc4(k1: &str, k2: &str) -> SystemParams {
    SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k(k1), k(k2))
}

fn points(p: &SystemParams, seed: u64, n: usize) -> Result<Vec<PhasePoint>> {
    Sampler::new(p, SamplerConfig::with_seed(seed)).sample(n)
}

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

/// Identity suite over the k grid. Group i joins only when asked and only
/// where the Euclidean extras exist.
fn suite(make: fn(&str, &str) -> SystemParams, include_i: bool) -> Outcome {
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut checked = 0;
    for (a, b) in K_GRID {
        let p = make(a, b);
        let pts = points(&p, 0, SUITE_POINTS)?;
        let ids: Vec<_> = builtin_identities(&p)
            .into_iter()
            .filter(|r| r.group != Group::I || (include_i && p.is_euclidean()))
            .collect();
        let stats = check_at_points(&ids, &p, &pts, &tol)?;
        checked += stats.len();
        let worst = stats
            .iter()
            .map(|s| s.max_residual / s.tolerance)
            .fold(0.0, f64::max);
        for s in stats.iter().filter(|s| !s.pass) {
            ok = false;
            notes.push(format!(
                "{} at k=({a},{b}) max {:.2e}",
                s.id, s.max_residual
            ));
        }
        notes.push(format!("k=({a},{b}) worst residual/tol {worst:.1e}"));
    }
    let elapsed = start.elapsed();
    if elapsed > SUITE_BUDGET {
        ok = false;
    }
    notes.push(format!(
        "{checked} identity checks in {:.1}s",
        elapsed.as_secs_f64()
    ));
    Ok((ok, notes.join("; ")))
}

fn criterion_1() -> Outcome {
    suite(kc3, false)
}

fn criterion_2() -> Outcome {
    suite(kc4, true)
}

fn criterion_3() -> Outcome {
    let p = kc4("1", "1");
    let expected = [
        ("L2", 2),
        ("L3", 2),
        ("K0", 2),
        ("J0", 4),
        ("K1", 3),
        ("K2", 4),
        ("J1", 5),
        ("J2", 6),
    ];
    let pts = points(&p, 3, 5)?;
    let mut ok = true;
    let mut row = Vec::new();
    for (name, d) in expected {
        let got: Vec<u32> = pts
            .iter()
            .map(|x| momentum_degree(name, &p, x))
            .collect::<Result<_>>()?;
        ok &= got.iter().all(|g| *g == d);
        row.push(format!("{name}={}", got[0]));
    }
    Ok((ok, row.join(" ")))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (a, b) in K_GRID {
        for p in [kc3(a, b), kc4(a, b)] {
            let pts = points(&p, 4, REALNESS_POINTS)?;
            let rows = analysis::realness(realness_names(&p), &p, &pts)?;
            let worst = rows
                .iter()
                .map(|r| r.max_imaginary_ratio)
                .fold(0.0, f64::max);
            ok &= worst < REALNESS_TOL;
            notes.push(format!("{:?}({a},{b}) {worst:.1e}", p.system));
        }
    }
    Ok((ok, notes.join(" ")))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let sets: [(SystemParams, &[&str], usize); 3] = [
        (kc3("1", "1"), &["H", "L2", "L3", "J1", "K0"], 5),
        (kc4("1", "1"), &["H", "L2", "L3", "J0", "K0"], 5),
        (kc4("1", "1"), &["H", "L2", "L3", "J0", "K0", "J0_prime"], 5),
    ];
    for (p, names, want) in sets {
        let pts = points(&p, 5, RANK_POINTS)?;
        let ranks: Vec<usize> = pts
            .iter()
            .map(|x| analysis::independence_rank(names, &p, x))
            .collect::<Result<_>>()?;
        let all = ranks.iter().all(|r| *r == want);
        ok &= all;
        notes.push(format!(
            "{:?} {} generators rank {}",
            p.system,
            names.len(),
            if all { want } else { 0 }
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_6() -> Outcome {
    let rel = derive_order12_relation(&kc4("1", "1"), &Order12Config::default())?;
    let a1 = rel.a1_vs_minus_4q < A1_TOL;
    let holdout = rel.holdout_residual < Order12Config::default().relation_tol;
    let emitted = ["A2", "A3", "A4", "A5", "A6"]
        .iter()
        .all(|n| rel.printed_diff.iter().any(|d| d.name == *n));
    let mismatched: Vec<String> = rel
        .printed_diff
        .iter()
        .filter(|d| !d.matches)
        .map(|d| format!("{} ({} monomials)", d.name, d.mismatches.len()))
        .collect();
    Ok((
        a1 && holdout && emitted,
        format!(
            "A1 vs -4Q {:.1e}, holdout {:.1e}, on-shell {:.1e}; reference-table mismatches: {}",
            rel.a1_vs_minus_4q,
            rel.holdout_residual,
            rel.on_shell_residual,
            if mismatched.is_empty() {
                "none".to_string()
            } else {
                mismatched.join(", ")
            }
        ),
    ))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [
        kc3("1", "1"),
        kc4("1", "1"),
        kc3("3", "5/3"),
        kc4("3", "5/3"),
    ] {
        let mut cfg = RunConfig::new(p);
        cfg.seed = 7;
        let r = report::run(Command::Orbit, &cfg)?;
        let worst = r.drift.iter().map(|d| d.max_drift).fold(0.0, f64::max);
        ok &= r.pass && r.orbits.len() == 10;
        notes.push(format!("{:?}({},{}) {worst:.1e}", p.system, p.k1, p.k2));
    }
    Ok((ok, notes.join(" ")))
}

fn criterion_8() -> Outcome {
    let two = RationalK::new(2, 1)?;
    let osc = SystemParams::osc(4.0, 0.0, 0.0, 0.0, two, two);
    let (kc, e, _) = stackel_params(&osc, 8.0)?;
    let mut map_ok =
        e == -1.0 && kc.alpha == -2.0 && kc.k1 == RationalK::ONE && kc.k2 == RationalK::ONE;
    let general = SystemParams::osc(3.0, 2.0, 6.0, 10.0, RationalK::new(2, 3)?, two);
    let (kg, eg, _) = stackel_params(&general, 12.0)?;
    map_ok &= kg.system == SystemKind::Kc4
        && eg == -0.75
        && kg.alpha == -3.0
        && kg.beta == 0.5
        && kg.gamma == 1.5
        && kg.d() == 2.5
        && kg.k1 == RationalK::new(1, 3)?
        && kg.k2 == RationalK::ONE;
    let mut worst = 0.0f64;
    for (o, ep) in [(osc, 8.0), (general, 60.0)] {
        let (_, energy, _) = stackel_params(&o, ep)?;
        for x in sample_energy_shell(&o, ep, SamplerConfig::with_seed(8), 100)? {
            let img = stackel_map(&o, ep, &x)?;
            let h =
                superint::systems::eval_core(superint::systems::CoreSym::H, &img.point, &img.kc)?;
            worst = worst.max((h.value.re - energy).abs());
        }
    }
    Ok((
        map_ok && worst < 1e-10,
        format!("parameter map exact: {map_ok}; max |H-E| {worst:.1e}"),
    ))
}

fn criterion_9() -> Outcome {
    let mut antisym = true;
    let (mut leibniz, mut jacobi) = (0.0f64, 0.0f64);
    let triples = [("J1", "K1", "L3"), ("J2", "K2", "L2"), ("J0", "K0", "H")];
    let p = kc4("1", "1");
    for x in points(&p, 9, AXIOM_POINTS)? {
        let c = Catalog::evaluate(&x, &p)?;
        for (a, b, h) in triples {
            let (fa, fb, fh) = (c.require(a)?, c.require(b)?, c.require(h)?);
            antisym &= bracket(&fa, &fb) == -bracket(&fb, &fa);
            let lhs = bracket_term(&fa, &(fb * fh));
            let t1 = bracket_term(&fa, &fb);
            let t2 = bracket_term(&fa, &fh);
            let rhs = t1.value * fh.value + fb.value * t2.value;
            let scale = (t1.mag * fh.value.norm() + fb.value.norm() * t2.mag)
                .max(lhs.mag)
                .max(1.0);
            leibniz = leibniz.max((lhs.value - rhs).norm() / scale);

            let arr = x.to_array();
            let inner = |u: &'static str, v: &'static str| {
                move |y: &[f64; 6]| -> Result<C64> {
                    let cy = Catalog::evaluate(&x.with_array(*y), &p)?;
                    Ok(bracket(&cy.require(u)?, &cy.require(v)?))
                }
            };
            let j1 = nested_bracket(&fa, inner(b, h), &arr)?;
            let j2 = nested_bracket(&fb, inner(h, a), &arr)?;
            let j3 = nested_bracket(&fh, inner(a, b), &arr)?;
            let scale = j1.mag.max(j2.mag).max(j3.mag).max(1.0);
            jacobi = jacobi.max((j1.value + j2.value + j3.value).norm() / scale);
        }
    }
    Ok((
        antisym && leibniz < LEIBNIZ_TOL && jacobi < JACOBI_TOL,
        format!("antisymmetry exact: {antisym}; Leibniz {leibniz:.1e}; Jacobi {jacobi:.1e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("identity suite, three-parameter system", criterion_1),
        ("identity suite, four-parameter system", criterion_2),
        ("momentum degree table", criterion_3),
        ("realness at 1000 points", criterion_4),
        ("functional independence", criterion_5),
        ("order-12 relation", criterion_6),
        ("conservation along orbits", criterion_7),
        ("oscillator energy-shell map", criterion_8),
        ("bracket axioms", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
