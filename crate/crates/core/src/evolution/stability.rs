//! Numerical check of uniform stability.
//!
//! For a reference run `x(t)` from `x₀` and a perturbed run `y(t)` from `y₀`,
//! the exponentially weighted deviation `e^{−N t} ‖x(t) − y(t)‖₁` must stay
//! strictly below the initial gap `‖x₀ − y₀‖₁` for every `t > 0`, with the
//! weight rate `N` large enough that `L K < N^α`.

use rayon::prelude::*;
use serde::Serialize;

use super::simulate::{simulate, Trajectory};
use super::EvolutionError;
use crate::fractional::SolverConfig;
use crate::game::{Game, MixedStrategyProfile};

/// Largest `‖φ(x*)‖∞` accepted as an equilibrium for probing.
pub const MAX_EQUILIBRIUM_RESIDUAL: f64 = 1e-3;

/// `N = (1 + L K)^{1/α}`, which satisfies `L K < N^α`.
pub fn weight_rate_for(lipschitz: f64, dimension: usize, alpha: f64) -> f64 {
    (1.0 + dimension as f64 * lipschitz).powf(1.0 / alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome {
    pub start: MixedStrategyProfile,
    /// `‖x₀ − y₀‖₁`.
    pub initial_gap: f64,
    /// `sup_{t>0} e^{−N t} ‖x(t) − y(t)‖₁`.
    pub weighted_sup: f64,
    /// `‖x(T) − y(T)‖∞`.
    pub terminal_gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub weight_rate: f64,
    pub probes: Vec<ProbeOutcome>,
    /// Largest `weighted_sup / initial_gap` over probes with a nonzero gap.
    pub worst_ratio: f64,
}

impl StabilityReport {
    pub fn all_passed(&self) -> bool {
        self.probes.iter().all(|p| p.passed)
    }
}

/// Starts at L1 distance `delta` from `x_star`: for every provider and every
/// strategy not already holding all the mass, move toward that vertex.
pub fn perturbation_starts(x_star: &MixedStrategyProfile, delta: f64) -> Vec<MixedStrategyProfile> {
    let mut starts = Vec::new();
    for i in 0..x_star.num_providers() {
        let block = x_star.block(i);
        for (j, &mass) in block.iter().enumerate() {
            if mass >= 1.0 - 1e-12 {
                continue;
            }
            let s = (delta / (2.0 * (1.0 - mass))).min(1.0);
            let blocks: Vec<Vec<f64>> = x_star
                .blocks()
                .enumerate()
                .map(|(h, b)| {
                    if h != i {
                        return b.to_vec();
                    }
                    b.iter()
                        .enumerate()
                        .map(|(q, &v)| (1.0 - s) * v + if q == j { s } else { 0.0 })
                        .collect()
                })
                .collect();
            starts.push(MixedStrategyProfile::from_blocks_unchecked(blocks));
        }
    }
    starts
}

/// Probes the default perturbation set of radius `delta` around `x_star`.
pub fn stability_probe(
    game: &Game,
    x_star: &MixedStrategyProfile,
    delta: f64,
    solver: &SolverConfig,
    gamma: f64,
    weight_rate: f64,
) -> Result<StabilityReport, EvolutionError> {
    if !(delta > 0.0) {
        return Err(EvolutionError::InvalidInput(format!(
            "perturbation radius must be positive, got {delta}"
        )));
    }
    let starts = perturbation_starts(x_star, delta);
    stability_probe_from(game, x_star, &starts, solver, gamma, weight_rate)
}

/// Probes explicit perturbed starts around `x_star`.
pub fn stability_probe_from(
    game: &Game,
    x_star: &MixedStrategyProfile,
    starts: &[MixedStrategyProfile],
    solver: &SolverConfig,
    gamma: f64,
    weight_rate: f64,
) -> Result<StabilityReport, EvolutionError> {
    game.check_profile(x_star)?;
    let residual = game
        .replicator_rhs(x_star, gamma)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if residual > MAX_EQUILIBRIUM_RESIDUAL {
        return Err(EvolutionError::NotAnEquilibrium {
            residual,
            limit: MAX_EQUILIBRIUM_RESIDUAL,
        });
    }
    if !(weight_rate > 0.0) {
        return Err(EvolutionError::InvalidInput(format!(
            "weight rate must be positive, got {weight_rate}"
        )));
    }

    let reference = simulate(game, x_star, solver, gamma)?;
    let probes = starts
        .par_iter()
        .map(|y0| {
            let perturbed = simulate(game, y0, solver, gamma)?;
            Ok(compare(&reference, &perturbed, weight_rate))
        })
        .collect::<Result<Vec<_>, EvolutionError>>()?;

    let worst_ratio = probes
        .iter()
        .filter(|p| p.initial_gap > 0.0)
        .map(|p| p.weighted_sup / p.initial_gap)
        .fold(0.0, f64::max);
    Ok(StabilityReport {
        weight_rate,
        probes,
        worst_ratio,
    })
}

fn compare(reference: &Trajectory, perturbed: &Trajectory, weight_rate: f64) -> ProbeOutcome {
    let start = perturbed.profiles[0].clone();
    let initial_gap = reference.profiles[0].l1_distance(&start);
    let weighted_sup = reference
        .times
        .iter()
        .zip(reference.profiles.iter().zip(&perturbed.profiles))
        .skip(1)
        .map(|(&t, (x, y))| (-weight_rate * t).exp() * x.l1_distance(y))
        .fold(0.0, f64::max);
    let passed = if initial_gap == 0.0 {
        weighted_sup == 0.0
    } else {
        weighted_sup < initial_gap
    };
    ProbeOutcome {
        start,
        initial_gap,
        weighted_sup,
        terminal_gap: reference.terminal().max_abs_diff(perturbed.terminal()),
        passed,
    }
}
