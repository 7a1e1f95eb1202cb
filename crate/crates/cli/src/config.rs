//! Scenario configuration files.
//!
//! A configuration is a JSON document whose serialized field order is fixed
//! by the types below, so the compact serialization doubles as a canonical
//! form for hashing.

use std::fs;
use std::path::Path;

use cef_core::evolution::ConvergenceThresholds;
use cef_core::experiments::Scenario;
use cef_core::fractional::{Corrector, FractionalOrder, SolverConfig};
use cef_core::game::{
    EipConfig, InvariantViolation, MixedStrategyProfile, PayoffOptions, TaskSpec, SIMPLEX_TOLERANCE,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// The reference scenario shipped with the tool.
pub const PAPER_TABLES_JSON: &str = include_str!("../configs/paper_tables.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("configuration violates {} invariant(s):\n{}", .0.len(), list(.0))]
    Invalid(Vec<InvariantViolation>),
}

fn list(violations: &[InvariantViolation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: f64,
    pub horizon: f64,
    pub steps: usize,
    #[serde(default)]
    pub corrector: Corrector,
    #[serde(default = "one")]
    pub corrector_iterations: usize,
    #[serde(default)]
    pub initial_derivative: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Charge the full utilization cost instead of the per-cloud share.
    #[serde(default)]
    pub utilization_cost_literal_eq10: bool,
    /// Keep only this many recent steps in the memory integral.
    #[serde(default)]
    pub memory_truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub eips: Vec<EipConfig>,
    pub tasks: Vec<TaskSpec>,
    pub solver: SolverSection,
    pub gamma: f64,
    /// Per-provider mixed strategies; uniform when absent.
    #[serde(default)]
    pub initial_profile: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub flags: Flags,
}

impl ScenarioConfig {
    /// The bundled reference configuration.
    pub fn paper_tables() -> Self {
        parse_config_str(PAPER_TABLES_JSON).expect("bundled configuration is valid")
    }

    /// Compact JSON in declaration order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Every violated invariant, with field paths.
    pub fn violations(&self) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        if let Err(e) = FractionalOrder::new(self.solver.alpha) {
            out.push(InvariantViolation::new("solver.alpha", e.to_string()));
        }
        if !(self.solver.horizon > 0.0 && self.solver.horizon.is_finite()) {
            out.push(InvariantViolation::new(
                "solver.horizon",
                "must be positive and finite",
            ));
        }
        if self.solver.steps < 2 {
            out.push(InvariantViolation::new(
                "solver.steps",
                "must be at least 2",
            ));
        }
        if self.solver.corrector_iterations < 1 {
            out.push(InvariantViolation::new(
                "solver.corrector_iterations",
                "must be at least 1",
            ));
        }
        if let Some(d) = &self.solver.initial_derivative {
            let dim: usize = self.eips.iter().map(EipConfig::strategy_count).sum();
            if d.len() != dim {
                out.push(InvariantViolation::new(
                    "solver.initial_derivative",
                    format!("has {} entries, the state has {dim}", d.len()),
                ));
            }
        }
        if self.flags.memory_truncation == Some(0) {
            out.push(InvariantViolation::new(
                "flags.memory_truncation",
                "window must be at least one step",
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            out.push(InvariantViolation::new(
                "gamma",
                "must be positive and finite",
            ));
        }
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
        if let Some(blocks) = &self.initial_profile {
            out.extend(profile_violations(blocks, &self.eips));
        }
        out
    }

    /// The validated scenario this configuration describes.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(ConfigError::Invalid(violations));
        }
        let order = FractionalOrder::new(self.solver.alpha).expect("validated");
        let mut solver = SolverConfig::new(order, self.solver.horizon, self.solver.steps)
            .with_corrector(self.solver.corrector);
        solver.corrector_iterations = self.solver.corrector_iterations;
        solver.initial_derivative = self.solver.initial_derivative.clone();
        solver.memory_truncation = self.flags.memory_truncation;
        let initial = match &self.initial_profile {
            Some(blocks) => Some(MixedStrategyProfile::from_blocks(blocks.clone()).map_err(
                |e| {
                    ConfigError::Invalid(vec![InvariantViolation::new(
                        "initial_profile",
                        e.to_string(),
                    )])
                },
            )?),
            None => None,
        };
        Ok(Scenario {
            eips: self.eips.clone(),
            tasks: self.tasks.clone(),
            options: PayoffOptions {
                literal_utilization_cost: self.flags.utilization_cost_literal_eq10,
            },
            solver,
            gamma: self.gamma,
            initial,
            thresholds: ConvergenceThresholds::default(),
        })
    }
}

fn profile_violations(blocks: &[Vec<f64>], eips: &[EipConfig]) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    if blocks.len() != eips.len() {
        out.push(InvariantViolation::new(
            "initial_profile",
            format!("has {} blocks for {} providers", blocks.len(), eips.len()),
        ));
    }
    for (i, (block, eip)) in blocks.iter().zip(eips).enumerate() {
        let path = format!("initial_profile[{i}]");
        if block.len() != eip.strategy_count() {
            out.push(InvariantViolation::new(
                path.clone(),
                format!(
                    "has {} entries, provider has {} strategies",
                    block.len(),
                    eip.strategy_count()
                ),
            ));
        }
        if block.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            out.push(InvariantViolation::new(
                path.clone(),
                "entries must be finite and non-negative",
            ));
        }
        let sum: f64 = block.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            out.push(InvariantViolation::new(
                path,
                format!("sums to {sum}, not 1"),
            ));
        }
    }
    out
}

/// Parses and validates a configuration document.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = serde_json::from_str(text)?;
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

/// Reads, parses and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}
