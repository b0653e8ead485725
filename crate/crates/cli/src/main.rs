//! `chaoslab`: batch driver for chaos expansions, kernel condition checks,
//! path simulation and regularity reports.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on a usage,
//! configuration or I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::ExperimentConfig;
use output::OutDir;

#[derive(Parser, Debug)]
#[command(name = "chaoslab", version, about = "Wiener chaos products, kernel conditions and path regularity")]
struct Cli {
    /// JSON experiment config; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; defaults to CHAOSLAB_WORKERS, then to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the main tolerance of the command.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Chaos expansion of a product of multiple integrals, checked against
    /// the moment oracle.
    Expand,
    /// Check the kernel conditions on one or more kernel specs.
    Verify,
    /// Simulate sample paths to CSV.
    Simulate,
    /// Regularity statistics of simulated, loaded or fixture paths.
    Report,
    /// Seeded fuzzing of the algebraic identities and bounds.
    Fuzz,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Io(String),
    Library(chaoslab::Error),
}

impl From<chaoslab::Error> for Failure {
    fn from(e: chaoslab::Error) -> Self {
        Failure::Library(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if cfg.workers.is_none() {
        if let Ok(v) = std::env::var("CHAOSLAB_WORKERS") {
            let w = v
                .parse()
                .map_err(|_| Failure::Config(format!("CHAOSLAB_WORKERS = {v:?} is not a count")))?;
            cfg.workers = Some(w);
        }
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = Some(t);
    }
    if let Some(t) = cfg.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Config(format!("tolerance {t} must be nonnegative")));
        }
        match cli.command {
            Command::Expand => cfg.expand.tolerance = t,
            Command::Verify => cfg.verify.sweep.drift_tol = t,
            Command::Report => cfg.report.slope_tolerance = t,
            Command::Fuzz => cfg.fuzz.identity_tolerance = t,
            Command::Simulate => {}
        }
    }
    if cfg.workers == Some(0) {
        return Err(Failure::Config("workers must be positive".into()));
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = resolve(cli)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let mut out = OutDir::create(&cfg.out_dir)?;
    let pass = match cli.command {
        Command::Expand => commands::expand::run(&cfg, &mut out)?,
        Command::Verify => commands::verify::run(&cfg, &mut out)?,
        Command::Simulate => commands::simulate::run(&cfg, &mut out)?,
        Command::Report => commands::report::run(&cfg, &mut out)?,
        Command::Fuzz => commands::fuzz::run(&cfg, &mut out)?,
    };
    println!(
        "{}: {} ({} files in {})",
        serde_json::to_value(cli.command).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        if pass { "pass" } else { "FAIL" },
        out.written().len(),
        cfg.out_dir.display()
    );
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("chaoslab: {e}");
            ExitCode::from(2)
        }
    }
}
