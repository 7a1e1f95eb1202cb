//! The coded-edge-federation game: provider and task parameters, strategy
//! profiles, worker-placement probabilities and expected utilities.
//!
//! Each edge infrastructure provider (EIP) is a population of edge clouds.
//! An edge cloud chooses how many workers `j ∈ {0, …, L_i}` to contribute
//! to the federation; the population state `x_i` is the distribution of that
//! choice across the provider's clouds.

mod payoff;
mod probability;

pub use payoff::{Game, PayoffOptions};
pub use probability::{joint_assignment_pmf, recovery_pmf, Outcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on per-provider probability mass.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid configuration: {}", format_violations(.0))]
    Invalid(Vec<InvariantViolation>),
    #[error("placement of {available} workers cannot recover a result needing {required}")]
    Unrecoverable { available: usize, required: usize },
    #[error("all task arrival rates are zero")]
    NoArrivals,
    #[error(
        "profile shape mismatch: expected {expected:?} strategies per provider, got {actual:?}"
    )]
    Shape {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },
}

fn format_violations(violations: &[InvariantViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One broken invariant, located by a field path such as `eips[1].capacity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolation {
    pub field: String,
    pub message: String,
}

impl InvariantViolation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Parameters of one edge infrastructure provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EipConfig {
    /// 1-based provider label.
    pub index: usize,
    /// Number of edge clouds `E_i` (population size).
    pub num_clouds: usize,
    /// Maximum workers one edge cloud can contribute, `L_i`.
    pub max_workers: usize,
    /// Fixed cost `C_i` amortised through the utilization cost.
    pub fixed_cost: f64,
    /// Calibration ratio `ρ_i ∈ (0, 1]`.
    pub calibration_ratio: f64,
    /// Cost per CPU cycle `c_i`.
    pub cpu_cost: f64,
    /// Total edge capacity `W_i` in workers.
    pub capacity: usize,
}

impl EipConfig {
    pub fn validate(&self, path: &str) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        if self.num_clouds < 1 {
            out.push(InvariantViolation::new(
                format!("{path}.num_clouds"),
                "must be at least 1",
            ));
        }
        if self.max_workers < 1 {
            out.push(InvariantViolation::new(
                format!("{path}.max_workers"),
                "must be at least 1",
            ));
        }
        if self.capacity < self.num_clouds * self.max_workers {
            out.push(InvariantViolation::new(
                format!("{path}.capacity"),
                format!(
                    "capacity {} is below num_clouds * max_workers = {}",
                    self.capacity,
                    self.num_clouds * self.max_workers
                ),
            ));
        }
        // Strict: w_i reaches 1 exactly when W_i = E_i L_i and the cost diverges.
        if self.capacity == self.num_clouds * self.max_workers && self.capacity > 0 {
            out.push(InvariantViolation::new(
                format!("{path}.capacity"),
                "capacity equal to num_clouds * max_workers makes the utilization cost unbounded",
            ));
        }
        if !(self.fixed_cost.is_finite() && self.fixed_cost >= 0.0) {
            out.push(InvariantViolation::new(
                format!("{path}.fixed_cost"),
                "must be finite and non-negative",
            ));
        }
        if !(self.cpu_cost.is_finite() && self.cpu_cost >= 0.0) {
            out.push(InvariantViolation::new(
                format!("{path}.cpu_cost"),
                "must be finite and non-negative",
            ));
        }
        if !(self.calibration_ratio > 0.0 && self.calibration_ratio <= 1.0) {
            out.push(InvariantViolation::new(
                format!("{path}.calibration_ratio"),
                "must lie in (0, 1]",
            ));
        }
        out
    }

    pub fn strategy_count(&self) -> usize {
        self.max_workers + 1
    }
}

/// A coded computing task type `(n, k)` with its reward scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    /// Workers requested.
    pub n: usize,
    /// Recovery threshold: results needed from the first `k` workers.
    pub k: usize,
    /// Base reward per unit.
    pub r0: f64,
    /// Additional reward per unit.
    pub r1: f64,
    /// Fixed participation reward.
    pub r2: f64,
    /// CPU cycles of the whole task.
    pub cycles: f64,
    /// Arrival rate of this task type.
    pub arrival_rate: f64,
}

impl TaskSpec {
    pub fn validate(&self, path: &str) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        if self.k < 1 {
            out.push(InvariantViolation::new(
                format!("{path}.k"),
                "must be at least 1",
            ));
        }
        if self.k > self.n {
            out.push(InvariantViolation::new(
                format!("{path}.k"),
                format!("recovery threshold {} exceeds n = {}", self.k, self.n),
            ));
        }
        for (name, value) in [
            ("r0", self.r0),
            ("r1", self.r1),
            ("r2", self.r2),
            ("cycles", self.cycles),
            ("arrival_rate", self.arrival_rate),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                out.push(InvariantViolation::new(
                    format!("{path}.{name}"),
                    "must be finite and non-negative",
                ));
            }
        }
        out
    }
}

/// Contribution `l_i` of every provider.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureStrategyProfile(pub Vec<usize>);

impl PureStrategyProfile {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }
}

/// Population states of all providers, stored provider-major in one flat
/// vector so it can be handed to the integrator without copying.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategyProfile {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

impl MixedStrategyProfile {
    /// Builds a profile from per-provider blocks, checking the simplex.
    pub fn from_blocks(blocks: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let mut violations = Vec::new();
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                violations.push(InvariantViolation::new(
                    format!("x[{i}]"),
                    "empty strategy block",
                ));
                continue;
            }
            for (j, &p) in block.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    violations.push(InvariantViolation::new(
                        format!("x[{i}][{j}]"),
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
            }
            let sum: f64 = block.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
                violations.push(InvariantViolation::new(
                    format!("x[{i}]"),
                    format!("probabilities sum to {sum}"),
                ));
            }
        }
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        Ok(Self::from_blocks_unchecked(blocks))
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<Vec<f64>>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut values = Vec::new();
        offsets.push(0);
        for block in blocks {
            values.extend(block);
            offsets.push(values.len());
        }
        Self { values, offsets }
    }

    /// Wraps a flat vector laid out like `template`, without validation.
    pub(crate) fn from_flat_unchecked(values: Vec<f64>, template: &MixedStrategyProfile) -> Self {
        debug_assert_eq!(values.len(), template.values.len());
        Self {
            values,
            offsets: template.offsets.clone(),
        }
    }

    /// Uniform distribution over each provider's strategies.
    pub fn uniform(eips: &[EipConfig]) -> Self {
        let blocks = eips
            .iter()
            .map(|e| vec![1.0 / e.strategy_count() as f64; e.strategy_count()])
            .collect();
        Self::from_blocks_unchecked(blocks)
    }

    /// All mass on the given contribution for every provider.
    pub fn pure(eips: &[EipConfig], choice: &[usize]) -> Self {
        let blocks = eips
            .iter()
            .zip(choice)
            .map(|(e, &c)| {
                let mut b = vec![0.0; e.strategy_count()];
                b[c] = 1.0;
                b
            })
            .collect();
        Self::from_blocks_unchecked(blocks)
    }

    pub fn num_providers(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.num_providers()).map(move |i| self.block(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.block(i)[j]
    }

    /// Probability mass on the highest contribution level of provider `i`.
    pub fn last_strategy(&self, i: usize) -> f64 {
        *self.block(i).last().expect("blocks are non-empty")
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn shape(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Componentwise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &MixedStrategyProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sum of absolute differences over all components.
    pub fn l1_distance(&self, other: &MixedStrategyProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// The reference parameter set: two providers, one task type.
pub fn reference_eips() -> Vec<EipConfig> {
    vec![
        EipConfig {
            index: 1,
            num_clouds: 100,
            max_workers: 4,
            fixed_cost: 1800.0,
            calibration_ratio: 1.0,
            cpu_cost: 1e-5,
            capacity: 500,
        },
        EipConfig {
            index: 2,
            num_clouds: 120,
            max_workers: 8,
            fixed_cost: 2800.0,
            calibration_ratio: 1.0,
            cpu_cost: 1e-5,
            capacity: 1100,
        },
    ]
}

pub fn reference_tasks() -> Vec<TaskSpec> {
    vec![TaskSpec {
        n: 6,
        k: 4,
        r0: 30.0,
        r1: 30.0,
        r2: 10.0,
        cycles: 1e6,
        arrival_rate: 1.0,
    }]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters_are_valid() {
        for (i, e) in reference_eips().iter().enumerate() {
            assert!(e.validate(&format!("eips[{i}]")).is_empty());
        }
        assert!(reference_tasks()[0].validate("tasks[0]").is_empty());
    }

    #[test]
    fn capacity_below_demand_names_the_field() {
        let mut e = reference_eips()[0].clone();
        e.capacity = 200;
        let v = e.validate("eips[0]");
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "eips[0].capacity");
    }

    #[test]
    fn k_above_n_is_rejected() {
        let mut t = reference_tasks()[0].clone();
        t.k = 7;
        let v = t.validate("tasks[0]");
        assert_eq!(v[0].field, "tasks[0].k");
    }

    #[test]
    fn profile_validation_collects_every_block() {
        let err =
            MixedStrategyProfile::from_blocks(vec![vec![0.5, 0.6], vec![1.2, -0.2]]).unwrap_err();
        match err {
            GameError::Invalid(v) => assert_eq!(v.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniform_profile_shape() {
        let x = MixedStrategyProfile::uniform(&reference_eips());
        assert_eq!(x.shape(), vec![5, 9]);
        assert!((x.block(1).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(x.last_strategy(0), 0.2);
    }
}
