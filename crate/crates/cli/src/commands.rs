use std::fs;
use std::path::{Path, PathBuf};

use cef_core::evolution::{
    calibrate_gamma, direction_field, last_strategy_grid, ConvergenceThresholds,
};
use cef_core::experiments::{
    convergence_study, kernel_study, run_sweep, Scenario, SweepParameter, SweepSpec,
};
use cef_core::fractional::FractionalOrder;

use crate::config::{parse_config, ScenarioConfig, PAPER_TABLES_JSON};
use crate::grid::parse_values;
use crate::output::{self, FieldDocument, FieldLine, Metadata, Report, TOOL_VERSION};
use crate::plot::{line_chart, Series};
use crate::{CliError, Command, EXIT_OK, EXIT_UNCONVERGED};

pub fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Simulate {
            config,
            alpha,
            gamma,
            out_dir,
        } => {
            let cfg = parse_config(&config)?;
            let outcome = cmd_simulate(&cfg, alpha, gamma, &out_dir)?;
            println!(
                "{} (t_adjacency = {}); wrote {}",
                if outcome.converged {
                    "converged"
                } else {
                    "not converged"
                },
                outcome
                    .t_adjacency
                    .map_or_else(|| "none".to_string(), |t| t.to_string()),
                out_dir.display()
            );
            Ok(if outcome.converged {
                EXIT_OK
            } else {
                EXIT_UNCONVERGED
            })
        }
        Command::Sweep {
            config,
            param,
            grid,
            alpha,
            out_dir,
        } => {
            let cfg = parse_config(&config)?;
            let parameter: SweepParameter =
                param
                    .parse()
                    .map_err(|e: cef_core::experiments::ExperimentError| {
                        CliError::Usage(e.to_string())
                    })?;
            let grid = grid
                .map(|g| parse_values(&g).map_err(CliError::Usage))
                .transpose()?;
            let rows = cmd_sweep(&cfg, parameter, grid, alpha, &out_dir)?;
            println!("wrote {rows} sweep rows to {}", out_dir.display());
            Ok(EXIT_OK)
        }
        Command::Field {
            config,
            grid_spec,
            stride,
            alpha,
            out_dir,
        } => {
            let cfg = parse_config(&config)?;
            let masses = parse_values(&grid_spec).map_err(CliError::Usage)?;
            let lines = cmd_field(&cfg, &masses, stride, alpha, &out_dir)?;
            println!("wrote {lines} polylines to {}", out_dir.display());
            Ok(EXIT_OK)
        }
        Command::Kernel {
            alphas,
            deltas,
            out_dir,
        } => {
            let alphas = parse_values(&alphas).map_err(CliError::Usage)?;
            let deltas = parse_values(&deltas).map_err(CliError::Usage)?;
            cmd_kernel(&alphas, &deltas, &out_dir)?;
            println!("wrote kernel table to {}", out_dir.display());
            Ok(EXIT_OK)
        }
        Command::Convergence {
            config,
            alphas,
            out_dir,
        } => {
            let cfg = parse_config(&config)?;
            let alphas = parse_values(&alphas).map_err(CliError::Usage)?;
            cmd_convergence(&cfg, &alphas, &out_dir)?;
            println!("wrote convergence table to {}", out_dir.display());
            Ok(EXIT_OK)
        }
        Command::Calibrate { config } => {
            let cfg = parse_config(&config)?;
            let scenario = cfg.to_scenario()?;
            let game = scenario.game()?;
            let calibration = calibrate_gamma(
                &game,
                &scenario.initial_profile(),
                &scenario.solver,
                ConvergenceThresholds::default(),
                -6..=6,
            )
            .map_err(|e| CliError::Scenario(e.to_string()))?;
            print!("{}", output::to_json(&calibration));
            Ok(EXIT_OK)
        }
        Command::ExampleConfig => {
            print!("{PAPER_TABLES_JSON}");
            Ok(EXIT_OK)
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn scenario_with(
    cfg: &ScenarioConfig,
    alpha: Option<f64>,
    gamma: Option<f64>,
) -> Result<Scenario, CliError> {
    let mut scenario = cfg.to_scenario()?;
    if let Some(a) = alpha {
        let order =
            FractionalOrder::new(a).map_err(|e| CliError::Usage(format!("--alpha: {e}")))?;
        scenario = scenario.with_order(order);
    }
    if let Some(g) = gamma {
        if !(g > 0.0 && g.is_finite()) {
            return Err(CliError::Usage(format!(
                "--gamma must be positive, got {g}"
            )));
        }
        scenario.gamma = g;
    }
    Ok(scenario)
}

fn metadata(cfg: &ScenarioConfig, scenario: &Scenario) -> Metadata {
    Metadata {
        config_hash: Some(cfg.hash()),
        alpha: Some(scenario.solver.order.value()),
        gamma: Some(scenario.gamma),
        steps: Some(scenario.solver.steps),
        tool_version: TOOL_VERSION,
    }
}

/// Result of `cmd_simulate`.
#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub converged: bool,
    pub t_adjacency: Option<f64>,
    pub trajectory_path: PathBuf,
    pub report_path: PathBuf,
}

pub fn cmd_simulate(
    cfg: &ScenarioConfig,
    alpha: Option<f64>,
    gamma: Option<f64>,
    out_dir: &Path,
) -> Result<SimulateOutcome, CliError> {
    let scenario = scenario_with(cfg, alpha, gamma)?;
    let run = scenario.run()?;
    prepare_dir(out_dir)?;
    let meta = metadata(cfg, &scenario);

    let trajectory_path = out_dir.join("trajectory.csv");
    output::write_file(
        &trajectory_path,
        &output::trajectory_csv(&run.trajectory, &meta),
    )?;
    let report = Report::new(
        &run.report,
        &run.trajectory,
        cfg.hash(),
        cfg.initial_profile.is_some(),
    );
    let report_path = out_dir.join("report.json");
    output::write_file(&report_path, &output::to_json(&report))?;

    let series = (0..run.report.equilibrium.num_providers())
        .map(|i| Series {
            label: format!("x_{}_last", i + 1),
            points: run
                .trajectory
                .times
                .iter()
                .zip(&run.trajectory.profiles)
                .map(|(&t, x)| (t, x.last_strategy(i)))
                .collect(),
        })
        .collect::<Vec<_>>();
    line_chart(
        &out_dir.join("trajectory.svg"),
        &format!("Last-strategy masses, alpha = {}", scenario.solver.order),
        "t",
        "mass",
        &series,
    )?;

    Ok(SimulateOutcome {
        converged: run.report.converged(),
        t_adjacency: run.report.t_adjacency,
        trajectory_path,
        report_path,
    })
}

/// Returns the number of rows written.
pub fn cmd_sweep(
    cfg: &ScenarioConfig,
    parameter: SweepParameter,
    grid: Option<Vec<f64>>,
    alpha: Option<f64>,
    out_dir: &Path,
) -> Result<usize, CliError> {
    let base = scenario_with(cfg, alpha, None)?;
    let spec = SweepSpec {
        parameter,
        grid: grid.unwrap_or_else(|| cef_core::experiments::default_grid(parameter)),
        base,
    };
    // Validate the whole grid before creating any output.
    spec.scenarios()?;
    let rows = run_sweep(&spec)?;
    prepare_dir(out_dir)?;
    let meta = metadata(cfg, &spec.base);
    output::write_file(
        &out_dir.join("sweep.csv"),
        &output::sweep_csv(parameter.name(), &rows, &meta),
    )?;

    let providers = rows.first().map_or(0, |r| r.last_strategy.len());
    let series = (0..providers)
        .map(|i| Series {
            label: format!("x_{}_last", i + 1),
            points: rows.iter().map(|r| (r.value, r.last_strategy[i])).collect(),
        })
        .collect::<Vec<_>>();
    line_chart(
        &out_dir.join("sweep.svg"),
        &format!("Equilibrium last-strategy mass vs {parameter}"),
        parameter.name(),
        "mass",
        &series,
    )?;
    Ok(rows.len())
}

/// Returns the number of polylines written.
pub fn cmd_field(
    cfg: &ScenarioConfig,
    masses: &[f64],
    stride: usize,
    alpha: Option<f64>,
    out_dir: &Path,
) -> Result<usize, CliError> {
    if stride == 0 {
        return Err(CliError::Usage("--stride must be positive".into()));
    }
    let scenario = scenario_with(cfg, alpha, None)?;
    let game = scenario.game()?;
    let grid = last_strategy_grid(&game, masses).map_err(|e| CliError::Usage(e.to_string()))?;
    let lines = direction_field(&game, &grid, stride, &scenario.solver, scenario.gamma)?;
    prepare_dir(out_dir)?;
    let doc = FieldDocument {
        meta: metadata(cfg, &scenario),
        stride,
        masses: masses.to_vec(),
        polylines: lines.iter().map(FieldLine::new).collect(),
    };
    output::write_file(&out_dir.join("field.json"), &output::to_json(&doc))?;

    if game.eips().len() >= 2 {
        let series = lines
            .iter()
            .map(|l| Series {
                label: String::new(),
                points: l
                    .points
                    .iter()
                    .map(|x| (x.last_strategy(0), x.last_strategy(1)))
                    .collect(),
            })
            .collect::<Vec<_>>();
        line_chart(
            &out_dir.join("field.svg"),
            &format!("Direction field, alpha = {}", scenario.solver.order),
            "x_1_last",
            "x_2_last",
            &series,
        )?;
    }
    Ok(lines.len())
}

pub fn cmd_kernel(alphas: &[f64], deltas: &[f64], out_dir: &Path) -> Result<(), CliError> {
    let rows = kernel_study(alphas, deltas)?;
    prepare_dir(out_dir)?;
    let meta = Metadata {
        config_hash: None,
        alpha: None,
        gamma: None,
        steps: None,
        tool_version: TOOL_VERSION,
    };
    output::write_file(
        &out_dir.join("kernel.csv"),
        &output::kernel_csv(&rows, &meta),
    )?;
    let series = alphas
        .iter()
        .map(|&a| Series {
            label: format!("alpha = {a}"),
            points: rows
                .iter()
                .filter(|r| r.alpha == a)
                .filter_map(|r| r.weight.map(|w| (r.delta, w)))
                .collect(),
        })
        .filter(|s| !s.points.is_empty())
        .collect::<Vec<_>>();
    line_chart(
        &out_dir.join("kernel.svg"),
        "Power-law memory kernel",
        "time gap",
        "weight",
        &series,
    )
}

pub fn cmd_convergence(
    cfg: &ScenarioConfig,
    alphas: &[f64],
    out_dir: &Path,
) -> Result<(), CliError> {
    let scenario = cfg.to_scenario()?;
    let rows = convergence_study(alphas, &scenario)?;
    prepare_dir(out_dir)?;
    let mut meta = metadata(cfg, &scenario);
    meta.alpha = None;
    output::write_file(
        &out_dir.join("convergence.csv"),
        &output::convergence_csv(&rows, &meta),
    )?;
    let pick = |f: fn(&cef_core::experiments::ConvergenceRow) -> Option<f64>| {
        rows.iter()
            .filter_map(|r| f(r).map(|t| (r.alpha, t)))
            .collect::<Vec<_>>()
    };
    line_chart(
        &out_dir.join("convergence.svg"),
        "Convergence time vs fractional order",
        "alpha",
        "t",
        &[
            Series {
                label: "adjacency".into(),
                points: pick(|r| r.t_adjacency),
            },
            Series {
                label: "neighborhood".into(),
                points: pick(|r| r.t_neighborhood),
            },
        ],
    )
}
