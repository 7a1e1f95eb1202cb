//! Simulator for the coded-edge-federation evolutionary game with Caputo
//! fractional replicator dynamics.
//!
//! - [`game`]: exact placement/recovery probabilities, expected utilities and
//!   the replicator field.
//! - [`fractional`]: gamma and Mittag-Leffler functions, the power-law memory
//!   kernel, Caputo derivative estimates and the predictor–corrector solver.
//! - [`evolution`]: simulation, convergence detection, direction fields and
//!   stability probes.
//! - [`experiments`]: parameter sweeps, convergence and kernel studies.

pub mod combinatorics;
pub mod evolution;
pub mod experiments;
pub mod fractional;
pub mod game;
