//! Experiment driver: config parsing, subcommand runners and CSV output.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{parse_config, ConfigError, ExperimentConfig};
use run::{RunOptions, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "indiff", version, about = "Indifference prices in the discretized Bachelier model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Certainty equivalents c(n, n*ell) and indifference prices by dynamic programming.
    PriceDiscrete,
    /// Limit value pi(ell) from the HJB solver (policy search for Asian claims).
    PriceLimit,
    /// Dual lower bounds from the constructed measures.
    DualBound,
    /// Monte Carlo check of the kernel penalty identity.
    KernelCheck,
    /// Full convergence table of c(n, n*ell) against pi(ell).
    Converge,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Experiment file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo paths.
    #[arg(long, global = true, value_name = "N")]
    pub paths: Option<usize>,
    /// Monte Carlo substeps per rebalancing interval.
    #[arg(long, global = true, value_name = "M")]
    pub substeps: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    /// Fill the `runtime_ms` column (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(indiff_core::Error),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Config file with command-line overrides applied and revalidated.
pub fn load_config(args: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let path = args.config.as_ref().ok_or(ConfigError::Missing("--config"))?;
    let mut cfg = parse_config(path)?;
    if let Some(seed) = args.seed {
        cfg.mc.master_seed = seed;
    }
    if let Some(paths) = args.paths {
        cfg.mc.n_paths = paths;
    }
    if let Some(m) = args.substeps {
        cfg.mc.substeps_per_interval = m;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn emit(cfg: &ExperimentConfig, out: &RunOutput) -> Result<(), CliError> {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let csv = out.table.to_csv();
    match &cfg.out {
        Some(p) => write_file(p, &csv)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes()).map_err(|e| CliError::Io {
                path: "stdout".into(),
                reason: e.to_string(),
            })?;
        }
    }
    if let (Some(p), Some(s)) = (&cfg.surface_out, &out.surface) {
        write_file(p, s)?;
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.common)?;
    if cli.common.print_config {
        print!("{}", cfg.dump());
        return Ok(());
    }
    let result = match cli.command {
        Command::PriceDiscrete => run::price_discrete(&cfg, RunOptions { timing: cli.common.timing }),
        Command::PriceLimit => run::price_limit(&cfg, cfg.surface_out.is_some()),
        Command::DualBound => run::dual_bound(&cfg),
        Command::KernelCheck => run::kernel_check(&cfg),
        Command::Converge => run::converge(&cfg),
    };
    match result {
        Ok(out) => emit(&cfg, &out),
        Err(failure) => {
            emit(&cfg, &failure.output)?;
            Err(CliError::Numerical(failure.error))
        }
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
