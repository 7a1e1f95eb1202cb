//! Replicator dynamics of the federation game integrated with the Caputo
//! solver, and the analyses run on the resulting trajectories.

mod convergence;
mod field;
mod lipschitz;
mod simplex;
mod simulate;
mod stability;

pub use convergence::{detect_convergence, ConvergenceThresholds, EquilibriumReport};
pub use field::{direction_field, last_strategy_grid, Polyline};
pub use lipschitz::{estimate_lipschitz, lipschitz_ratio_l1, lipschitz_ratio_sup, simplex_samples};
pub use simplex::{project_simplex, project_simplex_in_place};
pub use simulate::{calibrate_gamma, simulate, GammaCalibration, Trajectory};
pub use stability::{
    perturbation_starts, stability_probe, stability_probe_from, weight_rate_for, ProbeOutcome,
    StabilityReport, MAX_EQUILIBRIUM_RESIDUAL,
};

use thiserror::Error;

use crate::fractional::FractionalError;
use crate::game::GameError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("integration failed: {0}")]
    Solver(#[from] FractionalError),
    #[error("provider {provider} has no probability mass left after clamping")]
    EmptyBlock { provider: usize },
    #[error("replicator residual {residual:e} at the candidate equilibrium exceeds {limit:e}")]
    NotAnEquilibrium { residual: f64, limit: f64 },
    #[error("{0}")]
    InvalidInput(String),
}
