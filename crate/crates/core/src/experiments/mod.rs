//! Batch studies over the evolutionary game: parameter sweeps, convergence
//! timing across fractional orders, memory-kernel tables and trend checks.
//!
//! Every study is a pure function of its inputs. Grid points run in
//! parallel, but rows always come back in grid order.

mod scenario;
mod studies;
mod sweep;
mod trend;

pub use scenario::{Scenario, ScenarioRun};
pub use studies::{convergence_study, kernel_study, ConvergenceRow, KernelRow};
pub use sweep::{default_grid, run_sweep, SweepParameter, SweepRow, SweepSpec};
pub use trend::{check_trend, Trend, TrendCheck};

use thiserror::Error;

use crate::evolution::EvolutionError;
use crate::fractional::FractionalError;
use crate::game::{GameError, InvariantViolation};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid study: {0}")]
    InvalidSpec(String),
    #[error("grid scenario violates {} invariant(s): {}", .0.len(), join(.0))]
    InvalidGrid(Vec<InvariantViolation>),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Fractional(#[from] FractionalError),
    #[error("run at {parameter} = {value} failed: {source}")]
    Run {
        parameter: String,
        value: f64,
        #[source]
        source: EvolutionError,
    },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

fn join(violations: &[InvariantViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
