//! Command-line driver for the coded edge federation simulator: reads a
//! scenario configuration, runs simulations and studies, and writes CSV,
//! JSON and SVG results.
//!
//! Exit codes: `0` success (for `simulate`, a converged run), `3` a run that
//! completed without converging, `1` usage or configuration errors, `2` a
//! numerical abort.

pub mod commands;
pub mod config;
pub mod grid;
pub mod output;
pub mod plot;

use std::path::PathBuf;

use cef_core::evolution::EvolutionError;
use cef_core::experiments::ExperimentError;
use cef_core::game::GameError;
use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;

/// Environment variable capping worker threads (`0` or unset: automatic).
pub const THREADS_ENV: &str = "CEF_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot draw {path}: {message}")]
    Plot { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl From<EvolutionError> for CliError {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::Solver(_) => CliError::Numerical(e.to_string()),
            other => CliError::Scenario(other.to_string()),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Scenario(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Run { source, .. } | ExperimentError::Evolution(source) => {
                source.into()
            }
            // Orders and gaps supplied by the user.
            ExperimentError::Fractional(f) => CliError::Usage(f.to_string()),
            other => CliError::Scenario(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cef",
    version,
    about = "Fractional evolutionary game simulator for coded edge federations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the dynamics once; writes trajectory.csv and report.json.
    Simulate {
        /// Scenario configuration (JSON).
        config: PathBuf,
        /// Override the fractional order.
        #[arg(long)]
        alpha: Option<f64>,
        /// Override the adaptation speed.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Vary one parameter over a grid; writes sweep.csv.
    Sweep {
        config: PathBuf,
        /// One of W1, E1, r1, n, k.
        #[arg(long)]
        param: String,
        /// `start:stop:step` or a comma list; the parameter's default grid
        /// when omitted.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Trajectories from a grid of last-strategy masses; writes field.json.
    Field {
        config: PathBuf,
        /// Masses on each provider's last strategy, applied to every provider.
        #[arg(long, default_value = "0.2:0.6:0.1")]
        grid_spec: String,
        /// Keep every `stride`-th step of each trajectory.
        #[arg(long, default_value_t = 200)]
        stride: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Tabulate the power-law memory kernel; writes kernel.csv.
    Kernel {
        #[arg(long, default_value = "0.65,0.8,1.2")]
        alphas: String,
        #[arg(long, default_value = "0.01:1:0.01")]
        deltas: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Convergence times across fractional orders; writes convergence.csv.
    Convergence {
        config: PathBuf,
        #[arg(long, default_value = "0.5,0.65,0.8,1,1.2,1.4")]
        alphas: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Pick the smallest power-of-ten adaptation speed that settles the
    /// classical dynamics within half the horizon; prints JSON.
    Calibrate { config: PathBuf },
    /// Print the bundled reference configuration.
    ExampleConfig,
}

/// Configures the thread pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    // A pool that already exists (e.g. in tests) is left as is.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Runs a parsed command and returns the process exit code, reporting
/// errors on stderr.
pub fn run(cli: Cli) -> i32 {
    let result = init_threads().and_then(|()| commands::dispatch(cli.command));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
