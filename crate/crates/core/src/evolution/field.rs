use rayon::prelude::*;
use serde::Serialize;

use super::simulate::simulate;
use super::EvolutionError;
use crate::fractional::SolverConfig;
use crate::game::{Game, MixedStrategyProfile};

/// A trajectory sampled every `stride` steps (and at the final step).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub times: Vec<f64>,
    pub points: Vec<MixedStrategyProfile>,
}

impl Polyline {
    pub fn terminal(&self) -> &MixedStrategyProfile {
        self.points.last().expect("polyline is never empty")
    }
}

/// Starting profiles that put mass `m` on each provider's last strategy and
/// spread `1 − m` evenly over the others, for every combination of the
/// given masses (first provider varies slowest).
pub fn last_strategy_grid(
    game: &Game,
    masses: &[f64],
) -> Result<Vec<MixedStrategyProfile>, EvolutionError> {
    if let Some(m) = masses.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(EvolutionError::InvalidInput(format!(
            "last-strategy mass {m} outside [0, 1]"
        )));
    }
    let counts = game.strategy_counts();
    let mut grid = vec![Vec::<Vec<f64>>::new()];
    for &count in &counts {
        let mut next = Vec::with_capacity(grid.len() * masses.len());
        for prefix in &grid {
            for &m in masses {
                let mut block = vec![(1.0 - m) / (count - 1) as f64; count];
                block[count - 1] = m;
                let mut blocks = prefix.clone();
                blocks.push(block);
                next.push(blocks);
            }
        }
        grid = next;
    }
    grid.into_iter()
        .map(|blocks| MixedStrategyProfile::from_blocks(blocks).map_err(Into::into))
        .collect()
}

/// Runs one trajectory per starting profile and keeps every `stride`-th
/// state. Results follow the order of `initial_grid`.
pub fn direction_field(
    game: &Game,
    initial_grid: &[MixedStrategyProfile],
    stride: usize,
    solver: &SolverConfig,
    gamma: f64,
) -> Result<Vec<Polyline>, EvolutionError> {
    if stride == 0 {
        return Err(EvolutionError::InvalidInput(
            "stride must be positive".into(),
        ));
    }
    initial_grid
        .par_iter()
        .map(|x0| {
            let traj = simulate(game, x0, solver, gamma)?;
            let last = traj.steps();
            let keep = |s: &usize| s % stride == 0 || *s == last;
            Ok(Polyline {
                times: (0..=last).filter(keep).map(|s| traj.times[s]).collect(),
                points: (0..=last)
                    .filter(keep)
                    .map(|s| traj.profiles[s].clone())
                    .collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::FractionalOrder;
    use crate::game::{reference_eips, reference_tasks, PayoffOptions};

    fn game() -> Game {
        Game::new(
            reference_eips(),
            reference_tasks(),
            PayoffOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn grid_is_cartesian() {
        let g = game();
        let grid = last_strategy_grid(&g, &[0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(grid.len(), 25);
        assert_eq!(grid[0].last_strategy(0), 0.2);
        assert_eq!(grid[4].last_strategy(1), 0.6);
        assert_eq!(grid[5].last_strategy(0), 0.3);
        assert!((grid[7].get(1, 0) - 0.6 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_start_gives_degenerate_polyline() {
        let g = game();
        let x = MixedStrategyProfile::pure(g.eips(), &[4, 8]);
        let solver = SolverConfig::new(FractionalOrder::classical(), 1.0, 1_000);
        let lines = direction_field(&g, &[x.clone()], 200, &solver, 1.0).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].points.len(), 6);
        assert!(lines[0].points.iter().all(|p| p == &x));
    }
}
