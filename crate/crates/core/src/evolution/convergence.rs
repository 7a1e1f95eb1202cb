//! Post-hoc convergence detection.
//!
//! Both times are found by scanning backwards from the end of the run, so a
//! threshold counts as met only if it holds for the whole remainder.

use serde::{Deserialize, Serialize};

use super::simulate::Trajectory;
use crate::game::{Game, MixedStrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceThresholds {
    /// Bound on the componentwise change between adjacent states.
    pub adjacency: f64,
    /// Radius (max-norm) of the equilibrium neighborhood.
    pub neighborhood: f64,
}

impl Default for ConvergenceThresholds {
    fn default() -> Self {
        Self {
            adjacency: 1e-4,
            neighborhood: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    /// Terminal profile of the run.
    pub equilibrium: MixedStrategyProfile,
    pub t_adjacency: Option<f64>,
    pub t_neighborhood: Option<f64>,
    /// Average payoff `u_i(x*)` per provider.
    pub utilities: Vec<f64>,
    /// `‖φ(x*)‖∞` at the trajectory's adaptation speed.
    pub residual: f64,
}

impl EquilibriumReport {
    pub fn converged(&self) -> bool {
        self.t_adjacency.is_some()
    }
}

/// Detects adjacency and neighborhood convergence of a run.
///
/// `t_neighborhood` is the earliest grid time from which every later state
/// stays strictly within `neighborhood` of the terminal state; it is absent
/// when only the terminal state qualifies. Adjacency convergence means the
/// equilibrium is reached: step-to-step changes stay below `adjacency` from
/// then on *and* the state is inside the neighborhood, so `t_adjacency` is
/// never earlier than `t_neighborhood`. It is absent when the final step
/// itself breaks the threshold.
pub fn detect_convergence(
    game: &Game,
    traj: &Trajectory,
    thresholds: ConvergenceThresholds,
) -> EquilibriumReport {
    let last = traj.steps();
    let terminal = traj.terminal();

    let raw_adjacency = match traj
        .max_change
        .iter()
        .rposition(|&c| c >= thresholds.adjacency)
    {
        None => Some(0),
        Some(s) if s == last => None,
        Some(s) => Some(s),
    };
    let neighborhood = match traj
        .profiles
        .iter()
        .rposition(|p| p.max_abs_diff(terminal) >= thresholds.neighborhood)
    {
        None => Some(0),
        Some(m) if m + 1 >= last => None,
        Some(m) => Some(m + 1),
    };
    let adjacency = match (raw_adjacency, neighborhood) {
        (Some(a), Some(n)) => Some(a.max(n)),
        _ => None,
    };

    EquilibriumReport {
        equilibrium: terminal.clone(),
        t_adjacency: adjacency.map(|s| traj.times[s]),
        t_neighborhood: neighborhood.map(|s| traj.times[s]),
        utilities: utilities(game, terminal),
        residual: game
            .replicator_rhs(terminal, traj.gamma)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs())),
    }
}

fn utilities(game: &Game, x: &MixedStrategyProfile) -> Vec<f64> {
    (0..game.eips().len())
        .map(|i| game.average_payoff(i, x))
        .collect()
}
