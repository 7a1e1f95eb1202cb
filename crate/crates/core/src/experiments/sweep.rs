use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, Scenario};
use crate::game::InvariantViolation;

/// The single quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParameter {
    /// Edge capacity `W₁` of the first provider.
    #[serde(rename = "W1")]
    Capacity1,
    /// Edge cloud count `E₁` of the first provider.
    #[serde(rename = "E1")]
    Clouds1,
    /// Additional reward `r₁` of every task type.
    #[serde(rename = "r1")]
    Reward1,
    /// Requested workers `n` of every task type.
    #[serde(rename = "n")]
    CodeN,
    /// Recovery threshold `k` of every task type.
    #[serde(rename = "k")]
    CodeK,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 5] = [
        SweepParameter::Capacity1,
        SweepParameter::Clouds1,
        SweepParameter::Reward1,
        SweepParameter::CodeN,
        SweepParameter::CodeK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Capacity1 => "W1",
            SweepParameter::Clouds1 => "E1",
            SweepParameter::Reward1 => "r1",
            SweepParameter::CodeN => "n",
            SweepParameter::CodeK => "k",
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, SweepParameter::Reward1)
    }

    /// `base` with the parameter set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Result<Scenario, ExperimentError> {
        if !value.is_finite() || (self.is_integer() && (value < 0.0 || value.fract() != 0.0)) {
            return Err(ExperimentError::InvalidSpec(format!(
                "{} takes non-negative integer values, got {value}",
                self.name()
            )));
        }
        let mut s = base.clone();
        let count = value as usize;
        match self {
            SweepParameter::Capacity1 | SweepParameter::Clouds1 => {
                let eip = s.eips.first_mut().ok_or_else(|| {
                    ExperimentError::InvalidSpec("scenario has no providers".into())
                })?;
                if self == SweepParameter::Capacity1 {
                    eip.capacity = count;
                } else {
                    eip.num_clouds = count;
                }
            }
            SweepParameter::Reward1 => s.tasks.iter_mut().for_each(|t| t.r1 = value),
            SweepParameter::CodeN => s.tasks.iter_mut().for_each(|t| t.n = count),
            SweepParameter::CodeK => s.tasks.iter_mut().for_each(|t| t.k = count),
        }
        Ok(s)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                ExperimentError::InvalidSpec(format!(
                    "unknown sweep parameter {s:?}; expected one of W1, E1, r1, n, k"
                ))
            })
    }
}

/// Default grid per parameter.
///
/// The cloud-count grid stops below `W₁ / L₁` of the reference scenario
/// (`500 / 4 = 125`), since larger fleets exceed the edge capacity.
pub fn default_grid(parameter: SweepParameter) -> Vec<f64> {
    let range = |lo: u32, hi: u32, step: usize| (lo..=hi).step_by(step).map(f64::from).collect();
    match parameter {
        SweepParameter::Capacity1 => range(450, 900, 50),
        SweepParameter::Clouds1 => range(100, 120, 5),
        SweepParameter::Reward1 => range(10, 60, 10),
        SweepParameter::CodeN => range(4, 14, 1),
        SweepParameter::CodeK => range(4, 12, 1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub base: Scenario,
}

impl SweepSpec {
    /// The default grid of `parameter` around the reference scenario. The
    /// recovery-threshold sweep fixes `n = 12`.
    pub fn reference(parameter: SweepParameter) -> Self {
        let mut base = Scenario::reference();
        if parameter == SweepParameter::CodeK {
            base.tasks.iter_mut().for_each(|t| t.n = 12);
        }
        Self {
            parameter,
            grid: default_grid(parameter),
            base,
        }
    }

    /// Checks the grid shape and every grid scenario, reporting all
    /// violations at once.
    pub fn scenarios(&self) -> Result<Vec<Scenario>, ExperimentError> {
        if self.grid.is_empty() {
            return Err(ExperimentError::InvalidSpec("sweep grid is empty".into()));
        }
        let increasing = self.grid.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.grid.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(ExperimentError::InvalidSpec(
                "sweep grid must be strictly monotone".into(),
            ));
        }
        let mut violations = Vec::new();
        let mut scenarios = Vec::with_capacity(self.grid.len());
        for &value in &self.grid {
            let s = self.parameter.apply(&self.base, value)?;
            violations.extend(s.violations().into_iter().map(|v| {
                InvariantViolation::new(
                    format!("{}={value}: {}", self.parameter, v.field),
                    v.message,
                )
            }));
            scenarios.push(s);
        }
        if violations.is_empty() {
            Ok(scenarios)
        } else {
            Err(ExperimentError::InvalidGrid(violations))
        }
    }
}

/// Recorded outputs at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// Equilibrium mass `x*_{i,L_i}` on each provider's largest contribution.
    pub last_strategy: Vec<f64>,
    /// Average utility `u_i(x*)` per provider.
    pub utilities: Vec<f64>,
    pub t_adjacency: Option<f64>,
    pub t_neighborhood: Option<f64>,
    pub residual: f64,
}

/// Runs one simulation per grid value, in parallel; rows follow the grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ExperimentError> {
    let scenarios = spec.scenarios()?;
    scenarios
        .par_iter()
        .zip(spec.grid.par_iter())
        .map(|(scenario, &value)| {
            let run = scenario.run().map_err(|source| ExperimentError::Run {
                parameter: spec.parameter.to_string(),
                value,
                source,
            })?;
            let x = &run.report.equilibrium;
            Ok(SweepRow {
                value,
                last_strategy: (0..x.num_providers()).map(|i| x.last_strategy(i)).collect(),
                utilities: run.report.utilities.clone(),
                t_adjacency: run.report.t_adjacency,
                t_neighborhood: run.report.t_neighborhood,
                residual: run.report.residual,
            })
        })
        .collect()
}
