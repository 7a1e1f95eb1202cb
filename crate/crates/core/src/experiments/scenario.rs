use serde::{Deserialize, Serialize};

use crate::evolution::{
    detect_convergence, simulate, ConvergenceThresholds, EquilibriumReport, EvolutionError,
    Trajectory,
};
use crate::fractional::{Corrector, FractionalOrder, SolverConfig};
use crate::game::{
    reference_eips, reference_tasks, EipConfig, Game, GameError, InvariantViolation,
    MixedStrategyProfile, PayoffOptions, TaskSpec,
};

/// Everything needed to run the dynamics once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub eips: Vec<EipConfig>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub options: PayoffOptions,
    pub solver: SolverConfig,
    /// Adaptation speed `γ`.
    pub gamma: f64,
    /// Starting profile; uniform over each provider's strategies when absent.
    #[serde(default)]
    pub initial: Option<MixedStrategyProfile>,
    #[serde(default)]
    pub thresholds: ConvergenceThresholds,
}

/// A finished run and its convergence report.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub report: EquilibriumReport,
}

impl Scenario {
    /// The reference providers and task on `[0, 1]` with `10⁴` steps,
    /// classical order, `γ = 1` and the Newton corrector (the reference
    /// field is stiff for the explicit corrector at small orders).
    pub fn reference() -> Self {
        Self {
            eips: reference_eips(),
            tasks: reference_tasks(),
            options: PayoffOptions::default(),
            solver: SolverConfig::new(FractionalOrder::classical(), 1.0, 10_000)
                .with_corrector(Corrector::Newton),
            gamma: 1.0,
            initial: None,
            thresholds: ConvergenceThresholds::default(),
        }
    }

    pub fn with_order(&self, order: FractionalOrder) -> Self {
        Self {
            solver: self.solver.with_order(order),
            ..self.clone()
        }
    }

    /// Every violated invariant of the scenario, with field paths.
    pub fn violations(&self) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        if self.eips.is_empty() {
            out.push(InvariantViolation::new(
                "eips",
                "at least one provider is required",
            ));
        }
        if self.tasks.is_empty() {
            out.push(InvariantViolation::new(
                "tasks",
                "at least one task type is required",
            ));
        }
        for (i, eip) in self.eips.iter().enumerate() {
            out.extend(eip.validate(&format!("eips[{i}]")));
        }
        for (t, task) in self.tasks.iter().enumerate() {
            out.extend(task.validate(&format!("tasks[{t}]")));
        }
        if let Err(e) = self.solver.validate() {
            out.push(InvariantViolation::new("solver", e.to_string()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            out.push(InvariantViolation::new(
                "gamma",
                "must be positive and finite",
            ));
        }
        if let Some(x) = &self.initial {
            let expected: Vec<usize> = self.eips.iter().map(EipConfig::strategy_count).collect();
            if x.shape() != expected {
                out.push(InvariantViolation::new(
                    "initial",
                    format!(
                        "shape {:?} does not match the providers' {:?}",
                        x.shape(),
                        expected
                    ),
                ));
            }
        }
        out
    }

    pub fn game(&self) -> Result<Game, GameError> {
        Game::new(self.eips.clone(), self.tasks.clone(), self.options)
    }

    pub fn initial_profile(&self) -> MixedStrategyProfile {
        self.initial
            .clone()
            .unwrap_or_else(|| MixedStrategyProfile::uniform(&self.eips))
    }

    /// Simulates and detects convergence.
    pub fn run(&self) -> Result<ScenarioRun, EvolutionError> {
        let game = self.game()?;
        self.run_on(&game)
    }

    /// As [`Scenario::run`] for an already constructed game.
    pub fn run_on(&self, game: &Game) -> Result<ScenarioRun, EvolutionError> {
        let trajectory = simulate(game, &self.initial_profile(), &self.solver, self.gamma)?;
        let report = detect_convergence(game, &trajectory, self.thresholds);
        Ok(ScenarioRun { trajectory, report })
    }
}
