//! Suite execution and the versioned JSON report.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, derive_order12_relation, momentum_degree, Order12Config, Order12Relation, RealnessRow,
};
use crate::catalog::{applicable_names, info, Catalog};
use crate::dynamics::{conservation_drift, integrate_many, OrbitStatus, Trajectory};
use crate::error::{Error, Result};
use crate::identities::{
    builtin_identities, check_at_points, median, Floor, Group, ResidualStats, Tier, Tolerances,
};
use crate::sampler::{sample_energy_shell, Sampler, SamplerConfig};
use crate::systems::{stackel_map, stackel_params, RationalK, SystemKind, SystemParams};

pub const SCHEMA: &str = "superint-report/1";
/// Relative drift allowed for every constant along an orbit.
pub const DRIFT_BUDGET: f64 = 1e-6;
/// |H - E| allowed at the image of an oscillator energy-shell point.
pub const SHELL_TOL: f64 = 1e-10;
/// Realness threshold for |Im S| / scale.
pub const REALNESS_TOL: f64 = 1e-9;
/// Points used per observable by `degree`.
pub const DEGREE_POINTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Orbit,
    Degree,
    Stackel,
    DeriveRelation,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "verify" => Command::Verify,
            "orbit" => Command::Orbit,
            "degree" => Command::Degree,
            "stackel" => Command::Stackel,
            "derive-relation" => Command::DeriveRelation,
            _ => return Err(Error::Config(format!("unknown command '{s}'"))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Verify => "verify",
            Command::Orbit => "orbit",
            Command::Degree => "degree",
            Command::Stackel => "stackel",
            Command::DeriveRelation => "derive-relation",
        })
    }
}

/// Everything a run depends on. For `stackel`, `params` is the oscillator
/// (primed strengths, k1 and k2 holding j1 and j2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub points: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub orbits: usize,
    pub duration: f64,
    pub integrator_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_prime: Option<f64>,
}

impl RunConfig {
    pub fn new(params: SystemParams) -> Self {
        RunConfig {
            params,
            points: 100,
            seed: 0,
            tolerances: Tolerances::default(),
            orbits: 10,
            duration: 10.0,
            integrator_tol: 1e-10,
            e_prime: None,
        }
    }

    fn sampler(&self) -> SamplerConfig {
        SamplerConfig::with_seed(self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCheck {
    pub observables: Vec<String>,
    pub expected: usize,
    pub points: usize,
    pub min_rank: usize,
    pub max_rank: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub observable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed: Option<u32>,
    pub measured: Vec<MeasuredDegree>,
    pub pass: bool,
}

/// Degree at one sampled point: `{"degree": 4}` or `{"error": "..."}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasuredDegree {
    Degree { degree: u32 },
    Error { error: String },
}

impl MeasuredDegree {
    pub fn is(&self, d: u32) -> bool {
        matches!(self, MeasuredDegree::Degree { degree } if *degree == d)
    }
}

impl std::fmt::Display for MeasuredDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasuredDegree::Degree { degree } => write!(f, "{degree}"),
            MeasuredDegree::Error { error } => f.write_str(error),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub observable: String,
    pub orbits: usize,
    pub max_drift: f64,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub index: usize,
    pub status: OrbitStatus,
    pub steps: usize,
    pub rejected: usize,
    pub final_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackelReport {
    pub kc_params: SystemParams,
    pub energy: f64,
    pub suite_applicable: bool,
    pub points: usize,
    /// max |H - E| / max(|E|, 1) at the images.
    pub max_shell_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A measured quantity the catalog states no closed form for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub description: String,
    pub points: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: Command,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub identities: Vec<ResidualStats>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub realness: Vec<RealnessRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ranks: Vec<RankCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub degrees: Vec<DegreeCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub drift: Vec<DriftRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub orbits: Vec<OrbitSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stackel: Option<StackelReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub relation: Option<Order12Relation>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub observations: Vec<Observation>,
    pub pass: bool,
}

impl Report {
    fn empty(command: Command, cfg: &RunConfig) -> Self {
        Report {
            schema: SCHEMA.into(),
            command,
            config: cfg.clone(),
            identities: vec![],
            realness: vec![],
            ranks: vec![],
            degrees: vec![],
            drift: vec![],
            orbits: vec![],
            stackel: None,
            relation: None,
            observations: vec![],
            pass: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Verify => verify(cfg),
        Command::Orbit => Ok(orbit(cfg)?.0),
        Command::Degree => degree(cfg),
        Command::Stackel => stackel(cfg),
        Command::DeriveRelation => derive_relation(cfg),
    }
}

fn require_kc(p: &SystemParams) -> Result<()> {
    if p.is_kc() {
        Ok(())
    } else {
        Err(Error::Config(
            "this command needs --system kc3 or kc4".into(),
        ))
    }
}

/// Generator sets whose Jacobian rank is claimed, with the expected rank.
pub fn rank_sets(p: &SystemParams) -> Vec<(Vec<&'static str>, usize)> {
    let mut out = Vec::new();
    match p.system {
        SystemKind::Kc3 => out.push((vec!["H", "L2", "L3", "J1", "K0"], 5)),
        SystemKind::Kc4 => out.push((vec!["H", "L2", "L3", "J0", "K0"], 5)),
        SystemKind::Osc => {}
    }
    if p.is_euclidean() {
        out.push((vec!["H", "L2", "L3", "J0", "K0", "J0_prime"], 5));
    }
    out
}

pub const REALNESS_NAMES_KC3: [&str; 5] = ["J1", "J2", "K1", "K2", "K0"];
pub const REALNESS_NAMES_KC4: [&str; 6] = ["J1", "J2", "K1", "K2", "J0", "K0"];

pub fn realness_names(p: &SystemParams) -> &'static [&'static str] {
    if p.system == SystemKind::Kc4 {
        &REALNESS_NAMES_KC4
    } else {
        &REALNESS_NAMES_KC3
    }
}

fn verify(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    require_kc(p)?;
    p.validate()?;
    p.require_odd()?;
    let pts = Sampler::new(p, cfg.sampler()).sample(cfg.points)?;
    let ids = builtin_identities(p);
    let mut r = Report::empty(Command::Verify, cfg);
    r.identities = check_at_points(&ids, p, &pts, &cfg.tolerances)?;
    r.realness = analysis::realness(realness_names(p), p, &pts)?;
    for (names, expected) in rank_sets(p) {
        let ranks: Vec<usize> = pts
            .iter()
            .map(|x| analysis::independence_rank(&names, p, x))
            .collect::<Result<_>>()?;
        let (lo, hi) = (*ranks.iter().min().unwrap(), *ranks.iter().max().unwrap());
        r.ranks.push(RankCheck {
            observables: names.iter().map(|s| s.to_string()).collect(),
            expected,
            points: ranks.len(),
            min_rank: lo,
            max_rank: hi,
            pass: lo == expected && hi == expected,
        });
    }
    if p.system == SystemKind::Kc3 {
        r.observations.push(r3_over_r2(p, &pts)?);
    }
    r.pass = r.identities.iter().all(|s| s.pass)
        && r.realness
            .iter()
            .all(|x| x.max_imaginary_ratio < REALNESS_TOL)
        && r.ranks.iter().all(|x| x.pass);
    Ok(r)
}

/// {J1,K0} / {L3,K0} in the three-parameter system.
fn r3_over_r2(p: &SystemParams, pts: &[crate::systems::PhasePoint]) -> Result<Observation> {
    let mut v = Vec::with_capacity(pts.len());
    for x in pts {
        let c = Catalog::evaluate(x, p)?;
        let r3 = crate::numeric::bracket(&c.require("J1")?, &c.require("K0")?);
        let r2 = crate::numeric::bracket(&c.require("L3")?, &c.require("K0")?);
        v.push((r3 / r2).re);
    }
    Ok(Observation {
        id: "kc3.R3_over_R2".into(),
        description: "ratio {J1,K0}/{L3,K0}; no closed form is asserted".into(),
        points: v.len(),
        min: v.iter().cloned().fold(f64::INFINITY, f64::min),
        median: median(&v),
        max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Names whose conservation is checked along orbits.
pub fn conserved_names(p: &SystemParams) -> Vec<&'static str> {
    applicable_names(p)
        .into_iter()
        .filter(|n| info(n).is_some_and(|i| i.conserved(p)))
        .collect()
}

/// Runs `orbit` and also hands back the trajectories for export.
pub fn orbit(cfg: &RunConfig) -> Result<(Report, Vec<Trajectory>)> {
    let p = &cfg.params;
    require_kc(p)?;
    p.validate()?;
    let x0s = Sampler::new(p, cfg.sampler()).sample(cfg.orbits)?;
    let trajs: Vec<Trajectory> = integrate_many(&x0s, p, cfg.duration, cfg.integrator_tol)
        .into_iter()
        .collect::<Result<_>>()?;
    let mut r = Report::empty(Command::Orbit, cfg);
    for n in conserved_names(p) {
        let mut worst = 0.0f64;
        for t in &trajs {
            worst = worst.max(conservation_drift(n, t, p)?);
        }
        r.drift.push(DriftRow {
            observable: n.into(),
            orbits: trajs.len(),
            max_drift: worst,
            budget: DRIFT_BUDGET,
            pass: worst < DRIFT_BUDGET,
        });
    }
    r.orbits = trajs
        .iter()
        .enumerate()
        .map(|(i, t)| OrbitSummary {
            index: i,
            status: t.status.clone(),
            steps: t.stats.steps,
            rejected: t.stats.rejected,
            final_time: *t.times.last().unwrap(),
        })
        .collect();
    r.pass = r.drift.iter().all(|d| d.pass);
    Ok((r, trajs))
}

fn degree(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    require_kc(p)?;
    p.validate()?;
    let n = cfg.points.min(DEGREE_POINTS);
    let pts = Sampler::new(p, cfg.sampler()).sample(n)?;
    let mut r = Report::empty(Command::Degree, cfg);
    for name in applicable_names(p) {
        let Some(claimed) = info(name).and_then(|i| i.degree_claim(p)) else {
            continue;
        };
        let measured: Vec<_> = pts
            .iter()
            .map(|x| match momentum_degree(name, p, x) {
                Ok(degree) => MeasuredDegree::Degree { degree },
                Err(e) => MeasuredDegree::Error {
                    error: e.to_string(),
                },
            })
            .collect();
        let pass = measured.iter().all(|m| m.is(claimed));
        r.degrees.push(DegreeCheck {
            observable: name.into(),
            claimed: Some(claimed),
            measured,
            pass,
        });
    }
    r.pass = r.degrees.iter().all(|d| d.pass);
    Ok(r)
}

fn stackel(cfg: &RunConfig) -> Result<Report> {
    let osc = &cfg.params;
    if osc.system != SystemKind::Osc {
        return Err(Error::Config("stackel starts from --system osc".into()));
    }
    osc.validate()?;
    let e_prime = cfg
        .e_prime
        .ok_or_else(|| Error::Config("stackel needs --e-prime".into()))?;
    let (kc, energy, suite_applicable) = stackel_params(osc, e_prime)?;
    let pts = sample_energy_shell(osc, e_prime, cfg.sampler(), cfg.points)?;
    let mut worst = 0.0f64;
    for x in &pts {
        let img = stackel_map(osc, e_prime, x)?;
        let h = crate::systems::eval_core(crate::systems::CoreSym::H, &img.point, &img.kc)?;
        worst = worst.max((h.value.re - energy).abs() / energy.abs().max(1.0));
    }
    let mut r = Report::empty(Command::Stackel, cfg);
    r.stackel = Some(StackelReport {
        kc_params: kc,
        energy,
        suite_applicable,
        points: pts.len(),
        max_shell_residual: worst,
        tolerance: SHELL_TOL,
        pass: worst < SHELL_TOL,
    });
    r.pass = worst < SHELL_TOL;
    Ok(r)
}

fn derive_relation(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    let oc = Order12Config {
        seed: cfg.seed,
        relation_tol: cfg.tolerances.relation,
        ..Order12Config::default()
    };
    let mut r = Report::empty(Command::DeriveRelation, cfg);
    match derive_order12_relation(p, &oc) {
        Ok(rel) => {
            r.pass = rel.pass;
            r.relation = Some(rel);
        }
        // A fit failure is a finding, not a usage error.
        Err(Error::FitFailure {
            residual,
            threshold,
        }) => {
            r.observations.push(Observation {
                id: "order12.fit_failure".into(),
                description: format!("fit residual {residual:e} above {threshold:e}"),
                points: oc.fit_points,
                min: residual,
                median: residual,
                max: residual,
            });
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}

/// One row of the exported identity catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub group: Group,
    pub tier: Tier,
    pub citation: String,
    /// Representative systems where the relation applies.
    pub applies_to: Vec<String>,
    pub nondegeneracy: Vec<Floor>,
    pub has_printed_variant: bool,
}

/// The relation catalog over representative parameter choices.
pub fn catalog_table() -> Vec<CatalogEntry> {
    let k = |p, q| RationalK::new(p, q).expect("valid index");
    let reps = [
        (
            "kc3, odd k",
            SystemParams::kc3(1.0, 2.0, 3.0, k(3, 1), k(5, 3)),
        ),
        (
            "kc3, even k",
            SystemParams::kc3(1.0, 2.0, 3.0, k(2, 1), k(1, 1)),
        ),
        (
            "kc4, odd k",
            SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k(3, 1), k(5, 3)),
        ),
        (
            "kc4, k1 = k2 = 1",
            SystemParams::kc4(1.0, 2.0, 3.0, 4.0, k(1, 1), k(1, 1)),
        ),
        (
            "kc4, k1 = k2 = 1, delta = 0",
            SystemParams::kc4(1.0, 2.0, 3.0, 0.0, k(1, 1), k(1, 1)),
        ),
    ];
    let mut out: Vec<CatalogEntry> = Vec::new();
    for (label, p) in reps {
        for rec in builtin_identities(&p) {
            let existing = out
                .iter_mut()
                .find(|e| e.id == rec.id && e.citation == rec.citation);
            match existing {
                Some(e) => e.applies_to.push(label.into()),
                None => out.push(CatalogEntry {
                    id: rec.id.clone(),
                    group: rec.group,
                    tier: rec.tier,
                    citation: rec.citation.clone(),
                    applies_to: vec![label.into()],
                    nondegeneracy: rec.nondegeneracy.clone(),
                    has_printed_variant: rec.printed.is_some(),
                }),
            }
        }
    }
    out
}
