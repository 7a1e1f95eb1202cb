//! Configuration handling, output files and the `cef` binary's exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cef_cli::commands::{cmd_field, cmd_simulate, cmd_sweep};
use cef_cli::config::{ConfigError, ScenarioConfig};
use cef_cli::{parse_config, parse_config_str, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use cef_core::experiments::SweepParameter;
use serde_json::Value;

fn cef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cef"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// The reference configuration with a coarser grid, written to `dir`.
fn coarse_config(dir: &Path, steps: usize) -> (ScenarioConfig, PathBuf) {
    let mut cfg = ScenarioConfig::paper_tables();
    cfg.solver.steps = steps;
    let path = dir.join("coarse.json");
    std::fs::write(&path, cfg.to_pretty_json()).unwrap();
    (cfg, path)
}

fn bundled_config(dir: &Path) -> PathBuf {
    let path = dir.join("paper_tables.json");
    std::fs::write(&path, cef_cli::config::PAPER_TABLES_JSON).unwrap();
    path
}

#[test]
fn bundled_config_holds_reference_values() {
    let cfg = ScenarioConfig::paper_tables();
    let (e1, e2) = (&cfg.eips[0], &cfg.eips[1]);
    assert_eq!((e1.num_clouds, e1.max_workers, e1.capacity), (100, 4, 500));
    assert_eq!((e2.num_clouds, e2.max_workers, e2.capacity), (120, 8, 1100));
    assert_eq!((e1.fixed_cost, e2.fixed_cost), (1800.0, 2800.0));
    assert_eq!((e1.calibration_ratio, e1.cpu_cost), (1.0, 1e-5));
    assert_eq!((e2.calibration_ratio, e2.cpu_cost), (1.0, 1e-5));
    let t = &cfg.tasks[0];
    assert_eq!((t.n, t.k), (6, 4));
    assert_eq!((t.r0, t.r1, t.r2, t.cycles), (30.0, 30.0, 10.0, 1e6));
    assert_eq!(cfg.solver.steps, 10_000);
    assert_eq!(cfg.solver.horizon, 1.0);
    assert!(cfg.initial_profile.is_none());
    assert!(!cfg.flags.utilization_cost_literal_eq10);
}

#[test]
fn every_violation_is_reported_with_its_path() {
    let mut doc: Value = serde_json::from_str(cef_cli::config::PAPER_TABLES_JSON).unwrap();
    doc["tasks"][0]["k"] = 9.into();
    doc["eips"][0]["capacity"] = 100.into();
    doc["solver"]["alpha"] = 2.5.into();
    match parse_config_str(&doc.to_string()) {
        Err(ConfigError::Invalid(v)) => {
            let fields: Vec<&str> = v.iter().map(|v| v.field.as_str()).collect();
            assert!(fields.contains(&"tasks[0].k"), "{fields:?}");
            assert!(
                fields.iter().any(|f| f.starts_with("eips[0]")),
                "{fields:?}"
            );
            assert!(fields.contains(&"solver.alpha"), "{fields:?}");
        }
        other => panic!("expected violations, got {other:?}"),
    }
    assert!(matches!(
        parse_config_str("{\"eips\": []"),
        Err(ConfigError::Malformed(_))
    ));
    assert!(matches!(
        parse_config(Path::new("/nonexistent/cef.json")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn config_round_trips() {
    let mut cfg = ScenarioConfig::paper_tables();
    assert_eq!(parse_config_str(&cfg.to_pretty_json()).unwrap(), cfg);
    cfg.initial_profile = Some(vec![vec![0.2; 5], vec![1.0 / 9.0; 9]]);
    cfg.flags.memory_truncation = Some(500);
    let back = parse_config_str(&cfg.to_pretty_json()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    assert_ne!(cfg.hash(), ScenarioConfig::paper_tables().hash());
}

#[test]
fn simulate_writes_annotated_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = coarse_config(dir.path(), 2_000);
    let out = dir.path().join("run");
    let outcome = cmd_simulate(&cfg, None, None, &out).unwrap();
    assert!(outcome.converged);

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&outcome.report_path).unwrap()).unwrap();
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        &keys[..9],
        [
            "equilibrium",
            "t_adjacency",
            "t_neighborhood",
            "utilities",
            "residual",
            "config_hash",
            "alpha",
            "gamma",
            "steps"
        ]
    );
    assert_eq!(report["config_hash"], cfg.hash());
    assert_eq!(report["steps"], 2_000);
    assert_eq!(report["initial_profile_source"], "uniform");
    assert_eq!(report["initial_profile"][0][0], 0.2);

    let csv = std::fs::read_to_string(&outcome.trajectory_path).unwrap();
    let mut lines = csv.lines();
    let meta = lines.next().unwrap();
    assert!(
        meta.starts_with(&format!("# config_hash={}", cfg.hash())),
        "{meta}"
    );
    assert!(
        meta.contains("alpha=1,gamma=1,steps=2000,tool_version="),
        "{meta}"
    );
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,x_1_0,x_1_1,x_1_2,x_1_3,x_1_4,x_2_0,"));
    assert!(header.ends_with(",x_2_8"));
    assert_eq!(lines.count(), 2_001);
    assert!(out.join("trajectory.svg").exists());
}

#[test]
fn configured_initial_profile_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let (mut cfg, _) = coarse_config(dir.path(), 500);
    cfg.initial_profile = Some(vec![vec![0.1, 0.1, 0.1, 0.1, 0.6], vec![1.0 / 9.0; 9]]);
    let outcome = cmd_simulate(&cfg, None, None, dir.path()).unwrap();
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(outcome.report_path).unwrap()).unwrap();
    assert_eq!(report["initial_profile_source"], "config");
    assert_eq!(report["initial_profile"][0][4], 0.6);
}

#[test]
fn sweep_and_field_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = coarse_config(dir.path(), 1_000);
    let grid = (1..=6).map(|i| 10.0 * i as f64).collect();
    let rows = cmd_sweep(&cfg, SweepParameter::Reward1, Some(grid), None, dir.path()).unwrap();
    assert_eq!(rows, 6);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 6);
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "r1,x_1_last,x_2_last,u_1,u_2,t_adjacency,t_neighborhood,residual"
    );

    let masses = [0.2, 0.3, 0.4, 0.5, 0.6];
    let lines = cmd_field(&cfg, &masses, 200, None, dir.path()).unwrap();
    assert_eq!(lines, 25);
    let field: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("field.json")).unwrap())
            .unwrap();
    assert_eq!(field["polylines"].as_array().unwrap().len(), 25);
    assert_eq!(field["config_hash"], cfg.hash());
    // Samples every 200 steps plus the start: 0, 200, …, 1000.
    assert_eq!(field["polylines"][0]["times"].as_array().unwrap().len(), 6);
}

#[test]
fn binary_converges_on_reference_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = bundled_config(dir.path());
    let out = dir.path().join("a1");
    let o = cef(&[
        "simulate",
        config.to_str().unwrap(),
        "--alpha",
        "1",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(out.join("trajectory.csv").exists() && out.join("report.json").exists());
}

#[test]
fn binary_reports_numerical_abort_at_low_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = bundled_config(dir.path());
    let o = cef(&[
        "simulate",
        config.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_NUMERICAL));
    assert!(!o.stderr.is_empty());
}

#[test]
fn binary_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = cef(&["simulate", "/nonexistent/cef.json"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/cef.json"));

    let config = bundled_config(dir.path());
    let out = dir.path().join("w1");
    let o = cef(&[
        "sweep",
        config.to_str().unwrap(),
        "--param",
        "W1",
        "--grid",
        "100:200:50",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("W1=100"));
    assert!(!out.exists(), "no output for a rejected grid");

    let o = cef(&["sweep", config.to_str().unwrap(), "--param", "W9"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    let o = cef(&["bogus"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert_eq!(cef(&["--help"]).status.code(), Some(EXIT_OK));
}

#[test]
fn binary_kernel_and_example_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = cef(&["kernel", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3 * 100);
    assert!(dir.path().join("kernel.svg").exists());

    let o = cef(&["example-config"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let printed = parse_config_str(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(printed, ScenarioConfig::paper_tables());
}
