//! Caputo fractional calculus on a uniform grid.
//!
//! Orders are restricted to `0 < α < 2`: below one the Caputo derivative
//! remembers past changes of the state, above one it remembers past rates of
//! change. `α = 1` is the ordinary derivative.

mod caputo;
mod gamma;
mod kernel;
mod mittag_leffler;
mod solver;

pub use caputo::caputo_derivative_estimate;
pub use gamma::gamma;
pub use kernel::{MemoryKernel, MemoryWeight};
pub use mittag_leffler::mittag_leffler;
pub use solver::{solve_fde_ivp, solve_fde_ivp_with_hook, Corrector, FdeSolution, SolverConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractionalError {
    #[error("gamma function requires a positive argument, got {0}")]
    NonPositiveArgument(f64),
    #[error("memory kernel requires a positive time gap, got {0}")]
    NonPositiveGap(f64),
    #[error("fractional order must lie in (0, 2), got {0}")]
    InvalidOrder(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("Mittag-Leffler series for alpha = {alpha}, z = {z} is outside the accurate range")]
    OutsideConvergenceBox { alpha: f64, z: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
    #[error("Newton corrector failed to converge at step {step} (defect {residual:e})")]
    CorrectorDiverged { step: usize, residual: f64 },
    #[error("step {step} rejected: {message}")]
    StepRejected { step: usize, message: String },
}

/// A fractional order `α ∈ (0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self, FractionalError> {
        if alpha > 0.0 && alpha < 2.0 {
            Ok(Self(alpha))
        } else {
            Err(FractionalError::InvalidOrder(alpha))
        }
    }

    pub const fn classical() -> Self {
        Self(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 == 1.0
    }

    /// Number `n` of integer-order derivatives inside the Caputo operator:
    /// `⌊α⌋ + 1` for fractional `α`, `α` itself when integer.
    pub fn derivative_order(self) -> usize {
        if self.is_integer() {
            1
        } else {
            self.0.floor() as usize + 1
        }
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = FractionalError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(order: FractionalOrder) -> Self {
        order.0
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
