//! Numeric result files.
//!
//! CSV numbers use 17 significant digits in scientific notation, which
//! round-trips every `f64` and never depends on the locale. Each file
//! starts with one `#` line of run metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cef_core::evolution::{EquilibriumReport, Polyline, Trajectory};
use cef_core::experiments::{ConvergenceRow, KernelRow, SweepRow};
use cef_core::game::MixedStrategyProfile;
use serde::Serialize;

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance attached to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config_hash: Option<String>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub steps: Option<usize>,
    pub tool_version: &'static str,
}

impl Metadata {
    fn csv_comment(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(String::new, ToString::to_string)
        }
        format!(
            "# config_hash={},alpha={},gamma={},steps={},tool_version={}\n",
            opt(&self.config_hash),
            opt(&self.alpha),
            opt(&self.gamma),
            opt(&self.steps),
            self.tool_version
        )
    }
}

/// `f64` with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Column names `x_{i}_{j}`: provider `i` (1-based), strategy `j`.
pub fn profile_columns(shape: &[usize]) -> Vec<String> {
    shape
        .iter()
        .enumerate()
        .flat_map(|(i, &count)| (0..count).map(move |j| format!("x_{}_{j}", i + 1)))
        .collect()
}

pub fn trajectory_csv(traj: &Trajectory, meta: &Metadata) -> String {
    let shape = traj.profiles[0].shape();
    let mut out = meta.csv_comment();
    out.push('t');
    for c in profile_columns(&shape) {
        out.push(',');
        out.push_str(&c);
    }
    out.push('\n');
    for (t, x) in traj.times.iter().zip(&traj.profiles) {
        out.push_str(&fmt_num(*t));
        for v in x.as_flat() {
            out.push(',');
            out.push_str(&fmt_num(*v));
        }
        out.push('\n');
    }
    out
}

fn blocks(x: &MixedStrategyProfile) -> Vec<Vec<f64>> {
    x.blocks().map(<[f64]>::to_vec).collect()
}

/// Field order of `report.json`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub equilibrium: Vec<Vec<f64>>,
    pub t_adjacency: Option<f64>,
    pub t_neighborhood: Option<f64>,
    pub utilities: Vec<f64>,
    pub residual: f64,
    pub config_hash: String,
    pub alpha: f64,
    pub gamma: f64,
    pub steps: usize,
    pub tool_version: &'static str,
    pub horizon: f64,
    pub converged: bool,
    pub initial_profile: Vec<Vec<f64>>,
    /// `"uniform"` when the configuration gave no initial profile.
    pub initial_profile_source: &'static str,
    pub max_projection: f64,
}

impl Report {
    pub fn new(
        report: &EquilibriumReport,
        traj: &Trajectory,
        config_hash: String,
        from_config: bool,
    ) -> Self {
        Self {
            equilibrium: blocks(&report.equilibrium),
            t_adjacency: report.t_adjacency,
            t_neighborhood: report.t_neighborhood,
            utilities: report.utilities.clone(),
            residual: report.residual,
            config_hash,
            alpha: traj.alpha,
            gamma: traj.gamma,
            steps: traj.steps(),
            tool_version: TOOL_VERSION,
            horizon: *traj.times.last().expect("non-empty"),
            converged: report.converged(),
            initial_profile: blocks(&traj.profiles[0]),
            initial_profile_source: if from_config { "config" } else { "uniform" },
            max_projection: traj.max_projection(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn sweep_csv(parameter: &str, rows: &[SweepRow], meta: &Metadata) -> String {
    let providers = rows.first().map_or(0, |r| r.last_strategy.len());
    let mut out = meta.csv_comment();
    out.push_str(parameter);
    for i in 1..=providers {
        let _ = write!(out, ",x_{i}_last");
    }
    for i in 1..=providers {
        let _ = write!(out, ",u_{i}");
    }
    out.push_str(",t_adjacency,t_neighborhood,residual\n");
    for r in rows {
        out.push_str(&fmt_num(r.value));
        for v in r.last_strategy.iter().chain(&r.utilities) {
            out.push(',');
            out.push_str(&fmt_num(*v));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_opt(r.t_adjacency),
            fmt_opt(r.t_neighborhood),
            fmt_num(r.residual)
        );
    }
    out
}

pub fn kernel_csv(rows: &[KernelRow], meta: &Metadata) -> String {
    let mut out = meta.csv_comment();
    out.push_str("alpha,delta,weight\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_num(r.alpha),
            fmt_num(r.delta),
            fmt_opt(r.weight)
        );
    }
    out
}

pub fn convergence_csv(rows: &[ConvergenceRow], meta: &Metadata) -> String {
    let providers = rows
        .iter()
        .find_map(|r| r.last_strategy.as_ref().map(Vec::len))
        .unwrap_or(0);
    let mut out = meta.csv_comment();
    out.push_str("alpha,t_adjacency,t_neighborhood");
    for i in 1..=providers {
        let _ = write!(out, ",x_{i}_last");
    }
    out.push_str(",aborted\n");
    for r in rows {
        let _ = write!(
            out,
            "{},{},{}",
            fmt_num(r.alpha),
            fmt_opt(r.t_adjacency),
            fmt_opt(r.t_neighborhood)
        );
        for i in 0..providers {
            out.push(',');
            out.push_str(&fmt_opt(r.last_strategy.as_ref().map(|x| x[i])));
        }
        out.push(',');
        // Keep the message inside one CSV field.
        let msg = r.aborted.as_deref().unwrap_or("").replace(['"', ','], " ");
        out.push_str(&msg);
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct FieldLine {
    pub start: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    pub points: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize)]
pub struct FieldDocument {
    #[serde(flatten)]
    pub meta: Metadata,
    pub stride: usize,
    pub masses: Vec<f64>,
    pub polylines: Vec<FieldLine>,
}

impl FieldLine {
    pub fn new(line: &Polyline) -> Self {
        Self {
            start: blocks(&line.points[0]),
            times: line.times.clone(),
            points: line.points.iter().map(blocks).collect(),
        }
    }
}
