use serde::Serialize;

use super::convergence::{detect_convergence, ConvergenceThresholds};
use super::simplex::project_simplex_in_place;
use super::stability::MAX_EQUILIBRIUM_RESIDUAL;
use super::EvolutionError;
use crate::fractional::{solve_fde_ivp_with_hook, FractionalOrder, SolverConfig};
use crate::game::{Game, MixedStrategyProfile};

/// Time-indexed population states of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub profiles: Vec<MixedStrategyProfile>,
    /// `max |x(t_s) − x(t_{s−1})|` per step; zero at `t = 0`.
    pub max_change: Vec<f64>,
    /// L1 size of the simplex projection applied after each step.
    pub projection: Vec<f64>,
    /// Corrector residual reported by the solver per step.
    pub corrector_residuals: Vec<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub step_size: f64,
}

impl Trajectory {
    pub fn terminal(&self) -> &MixedStrategyProfile {
        self.profiles.last().expect("trajectory is never empty")
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn max_projection(&self) -> f64 {
        self.projection.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates the (fractional) replicator dynamics from `x_init`.
pub fn simulate(
    game: &Game,
    x_init: &MixedStrategyProfile,
    solver: &SolverConfig,
    gamma: f64,
) -> Result<Trajectory, EvolutionError> {
    game.check_profile(x_init)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(EvolutionError::InvalidInput(format!(
            "adaptation speed must be positive, got {gamma}"
        )));
    }
    let offsets = game.offsets().to_vec();
    let mut projection = vec![0.0];
    let solution = solve_fde_ivp_with_hook(
        |state: &[f64], out: &mut [f64]| game.replicator_rhs_flat(state, gamma, out),
        x_init.as_flat(),
        solver,
        |_, state| {
            let moved = project_simplex_in_place(state, &offsets).map_err(|e| e.to_string())?;
            projection.push(moved);
            Ok(())
        },
    )?;

    let mut profiles = Vec::with_capacity(solution.states.len());
    let mut max_change = Vec::with_capacity(solution.states.len());
    for (s, state) in solution.states.into_iter().enumerate() {
        let change = if s == 0 {
            0.0
        } else {
            let prev: &MixedStrategyProfile = &profiles[s - 1];
            prev.as_flat()
                .iter()
                .zip(&state)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        max_change.push(change);
        profiles.push(MixedStrategyProfile::from_flat_unchecked(state, x_init));
    }

    Ok(Trajectory {
        times: solution.times,
        profiles,
        max_change,
        projection,
        corrector_residuals: solution.corrector_residuals,
        alpha: solver.order.value(),
        gamma,
        step_size: solver.step_size(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCalibration {
    pub gamma: f64,
    pub t_adjacency: f64,
}

/// Picks the smallest `γ = 10^e`, `e ∈ exponents`, for which the classical
/// (`α = 1`) run settles: adjacency convergence is reached within the first
/// half of the horizon at a rest point of the dynamics.
///
/// The rest-point condition bounds `‖φ(x*)‖∞ / γ` by
/// [`MAX_EQUILIBRIUM_RESIDUAL`]; without it a tiny `γ` qualifies trivially,
/// because the state hardly moves at all.
pub fn calibrate_gamma(
    game: &Game,
    x_init: &MixedStrategyProfile,
    solver: &SolverConfig,
    thresholds: ConvergenceThresholds,
    exponents: std::ops::RangeInclusive<i32>,
) -> Result<GammaCalibration, EvolutionError> {
    let classical = solver.with_order(FractionalOrder::classical());
    for e in exponents.clone() {
        let gamma = 10f64.powi(e);
        let traj = match simulate(game, x_init, &classical, gamma) {
            Ok(t) => t,
            // Too fast for the step size; larger γ will not help either.
            Err(EvolutionError::Solver(_)) => break,
            Err(other) => return Err(other),
        };
        let report = detect_convergence(game, &traj, thresholds);
        let at_rest = report.residual / gamma <= MAX_EQUILIBRIUM_RESIDUAL;
        if let Some(t) = report.t_adjacency {
            if t <= 0.5 * classical.horizon && at_rest {
                return Ok(GammaCalibration {
                    gamma,
                    t_adjacency: t,
                });
            }
        }
    }
    Err(EvolutionError::InvalidInput(format!(
        "no adaptation speed 10^e with e in {exponents:?} settles within half the horizon"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::Corrector;
    use crate::game::{reference_eips, reference_tasks, PayoffOptions};

    fn game() -> Game {
        Game::new(
            reference_eips(),
            reference_tasks(),
            PayoffOptions::default(),
        )
        .unwrap()
    }

    fn solver(alpha: f64, steps: usize) -> SolverConfig {
        SolverConfig::new(FractionalOrder::new(alpha).unwrap(), 1.0, steps)
    }

    #[test]
    fn pure_fixed_point_is_stationary() {
        let g = game();
        let x = MixedStrategyProfile::pure(g.eips(), &[4, 8]);
        let traj = simulate(&g, &x, &solver(0.8, 200), 1.0).unwrap();
        assert!(traj.profiles.iter().all(|p| p == &x));
        assert!(traj.max_change.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn simplex_preserved() {
        let g = game();
        for &alpha in &[0.7, 1.0, 1.3] {
            let cfg = solver(alpha, 1_000).with_corrector(Corrector::Newton);
            let traj = simulate(&g, &g.uniform_profile(), &cfg, 0.1).unwrap();
            for p in &traj.profiles {
                for block in p.blocks() {
                    assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-6);
                    assert!(block.iter().all(|&v| v >= 0.0));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_gamma_and_shape() {
        let g = game();
        assert!(simulate(&g, &g.uniform_profile(), &solver(1.0, 10), 0.0).is_err());
        let wrong = MixedStrategyProfile::from_blocks(vec![vec![1.0]]).unwrap();
        assert!(matches!(
            simulate(&g, &wrong, &solver(1.0, 10), 1.0),
            Err(EvolutionError::Game(_))
        ));
    }

    #[test]
    fn calibration_ignores_runs_that_never_move() {
        let g = game();
        let cfg = solver(1.0, 2_000).with_corrector(Corrector::Newton);
        let picked = calibrate_gamma(
            &g,
            &g.uniform_profile(),
            &cfg,
            ConvergenceThresholds::default(),
            -6..=3,
        )
        .unwrap();
        assert_eq!(picked.gamma, 1.0);
        assert!(picked.t_adjacency <= 0.5);
    }
}
