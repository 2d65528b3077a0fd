use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use superint::dynamics::Trajectory;
use superint::error::Error;
use superint::identities::Tolerances;
use superint::report::{self, catalog_table, Command, Report, RunConfig};
use superint::systems::{RationalK, SystemKind, SystemParams};

#[derive(Parser)]
#[command(
    name = "superint",
    version,
    about = "Numerical verification of the Kepler-Coulomb symmetry algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every applicable structure relation at sampled points.
    Verify(VerifyArgs),
    /// Integrate orbits and measure drift of each constant of motion.
    Orbit(OrbitArgs),
    /// Measure the momentum degree of each polynomial constant.
    Degree(CommonArgs),
    /// Map the caged oscillator to the four-parameter system.
    Stackel(StackelArgs),
    /// Derive the order-12 relation among the Euclidean generators.
    DeriveRelation(CommonArgs),
    /// Print the relation catalog as JSON.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value = "kc4")]
    system: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Four-parameter system only; defaults to 4.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, default_value = "1/1")]
    k1: String,
    #[arg(long, default_value = "1/1")]
    k2: String,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SUPERINT_TOL_JET")]
    tol_jet: Option<f64>,
    #[arg(long, env = "SUPERINT_TOL_NESTED")]
    tol_nested: Option<f64>,
    #[arg(long, env = "SUPERINT_TOL_RELATION")]
    tol_relation: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 10)]
    orbits: usize,
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Integrator error tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Directory for one CSV file per trajectory.
    #[arg(long)]
    trajectory_csv: Option<PathBuf>,
}

#[derive(Args)]
struct StackelArgs {
    #[arg(long, default_value = "2/1")]
    j1: String,
    #[arg(long, default_value = "2/1")]
    j2: String,
    #[arg(long = "Eprime", alias = "e-prime", allow_hyphen_values = true)]
    e_prime: f64,
    #[arg(
        long = "alphaprime",
        alias = "alpha-prime",
        default_value_t = 1.0,
        allow_hyphen_values = true
    )]
    alpha_prime: f64,
    #[arg(
        long = "betaprime",
        alias = "beta-prime",
        default_value_t = 0.0,
        allow_hyphen_values = true
    )]
    beta_prime: f64,
    #[arg(
        long = "gammaprime",
        alias = "gamma-prime",
        default_value_t = 0.0,
        allow_hyphen_values = true
    )]
    gamma_prime: f64,
    #[arg(
        long = "deltaprime",
        alias = "delta-prime",
        default_value_t = 0.0,
        allow_hyphen_values = true
    )]
    delta_prime: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Usage errors exit with 2, suite failures with 1.
struct UsageError(anyhow::Error);

fn usage<E: Into<anyhow::Error>>(e: E) -> UsageError {
    UsageError(e.into())
}

fn parse_k(s: &str, flag: &str) -> Result<RationalK, UsageError> {
    s.parse()
        .map_err(|e: Error| usage(anyhow::anyhow!("--{flag}: {e}")))
}

fn tolerances(a: &CommonArgs) -> Result<Tolerances, UsageError> {
    let mut t = Tolerances::default();
    for (slot, v, name) in [
        (&mut t.jet, a.tol_jet, "jet"),
        (&mut t.nested, a.tol_nested, "nested"),
        (&mut t.relation, a.tol_relation, "relation"),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(anyhow::anyhow!(
                    "{name} tolerance must be positive, got {v}"
                )));
            }
            *slot = v;
        }
    }
    Ok(t)
}

fn config(a: &CommonArgs) -> Result<RunConfig, UsageError> {
    let system: SystemKind = a.system.parse().map_err(usage)?;
    let (k1, k2) = (parse_k(&a.k1, "k1")?, parse_k(&a.k2, "k2")?);
    let params = match system {
        SystemKind::Kc3 => {
            if a.delta.is_some() {
                return Err(usage(anyhow::anyhow!("--delta does not apply to kc3")));
            }
            SystemParams::kc3(a.alpha, a.beta, a.gamma, k1, k2)
        }
        SystemKind::Kc4 => {
            SystemParams::kc4(a.alpha, a.beta, a.gamma, a.delta.unwrap_or(4.0), k1, k2)
        }
        SystemKind::Osc => {
            return Err(usage(anyhow::anyhow!(
                "use the stackel command for the oscillator"
            )))
        }
    };
    let mut cfg = RunConfig::new(params);
    cfg.points = a.points;
    cfg.seed = a.seed;
    cfg.tolerances = tolerances(a)?;
    Ok(cfg)
}

fn csv_report(r: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match r.command {
        Command::Verify => {
            w.write_record([
                "id",
                "group",
                "tier",
                "points",
                "max_residual",
                "median_residual",
                "tolerance",
                "failures",
                "pass",
                "citation",
            ])?;
            for s in &r.identities {
                w.write_record([
                    s.id.clone(),
                    s.group.to_string(),
                    format!("{:?}", s.tier).to_lowercase(),
                    s.points.to_string(),
                    format!("{:e}", s.max_residual),
                    format!("{:e}", s.median_residual),
                    format!("{:e}", s.tolerance),
                    s.failures.to_string(),
                    s.pass.to_string(),
                    s.citation.clone(),
                ])?;
            }
        }
        Command::Orbit => {
            w.write_record(["observable", "orbits", "max_drift", "budget", "pass"])?;
            for d in &r.drift {
                w.write_record([
                    d.observable.clone(),
                    d.orbits.to_string(),
                    format!("{:e}", d.max_drift),
                    format!("{:e}", d.budget),
                    d.pass.to_string(),
                ])?;
            }
        }
        Command::Degree => {
            w.write_record(["observable", "claimed", "measured", "pass"])?;
            for d in &r.degrees {
                let m: Vec<String> = d.measured.iter().map(ToString::to_string).collect();
                w.write_record([
                    d.observable.clone(),
                    d.claimed.map_or(String::new(), |c| c.to_string()),
                    m.join(";"),
                    d.pass.to_string(),
                ])?;
            }
        }
        _ => bail!("CSV output covers verify, orbit and degree; use --format json"),
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn write_trajectories(dir: &Path, trajs: &[Trajectory]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, t) in trajs.iter().enumerate() {
        let path = dir.join(format!("orbit_{i:03}.csv"));
        let mut w =
            csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(t.column_names())?;
        for row in t.rows() {
            w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
    }
    Ok(())
}

fn finish(r: &Report, out: &OutputArgs) -> Result<ExitCode, UsageError> {
    let text = match out.format {
        Format::Json => r.to_json(),
        Format::Csv => csv_report(r).map_err(usage)?,
    };
    emit(&text, out.output.as_deref()).map_err(usage)?;
    Ok(ExitCode::from(r.exit_code() as u8))
}

/// Maps a library error to an exit code: usage problems 2, run failures 1.
fn library(e: Error) -> UsageError {
    UsageError(anyhow::Error::new(e))
}

fn dispatch(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.cmd {
        Cmd::Verify(a) => {
            let cfg = config(&a.common)?;
            let r = report::run(Command::Verify, &cfg).map_err(library)?;
            finish(&r, &a.common.out)
        }
        Cmd::Degree(a) => {
            let cfg = config(&a)?;
            let r = report::run(Command::Degree, &cfg).map_err(library)?;
            finish(&r, &a.out)
        }
        Cmd::DeriveRelation(a) => {
            let cfg = config(&a)?;
            let r = report::run(Command::DeriveRelation, &cfg).map_err(library)?;
            finish(&r, &a.out)
        }
        Cmd::Orbit(a) => {
            let mut cfg = config(&a.common)?;
            cfg.orbits = a.orbits;
            cfg.duration = a.duration;
            cfg.integrator_tol = a.tol;
            let (r, trajs) = report::orbit(&cfg).map_err(library)?;
            if let Some(dir) = &a.trajectory_csv {
                write_trajectories(dir, &trajs).map_err(usage)?;
            }
            finish(&r, &a.common.out)
        }
        Cmd::Stackel(a) => {
            let (j1, j2) = (parse_k(&a.j1, "j1")?, parse_k(&a.j2, "j2")?);
            let osc = SystemParams::osc(
                a.alpha_prime,
                a.beta_prime,
                a.gamma_prime,
                a.delta_prime,
                j1,
                j2,
            );
            let mut cfg = RunConfig::new(osc);
            cfg.points = a.points;
            cfg.seed = a.seed;
            cfg.e_prime = Some(a.e_prime);
            let r = report::run(Command::Stackel, &cfg).map_err(library)?;
            finish(&r, &a.out)
        }
        Cmd::Catalog(a) => {
            let text = serde_json::to_string_pretty(&catalog_table()).map_err(usage)?;
            emit(&text, a.output.as_deref()).map_err(usage)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<Error>().is_none_or(Error::is_config_error);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
