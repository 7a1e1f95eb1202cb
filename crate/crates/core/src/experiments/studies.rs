use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentError, Scenario};
use crate::fractional::{FractionalOrder, MemoryKernel};

/// Convergence times of one fractional order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub t_adjacency: Option<f64>,
    pub t_neighborhood: Option<f64>,
    /// Terminal mass on each provider's largest contribution.
    pub last_strategy: Option<Vec<f64>>,
    /// Solver failure, if the run aborted.
    pub aborted: Option<String>,
}

impl ConvergenceRow {
    pub fn converged(&self) -> bool {
        self.t_adjacency.is_some()
    }
}

/// One run per order, rows sorted by `α`. A numerical abort is recorded in
/// its row rather than failing the whole study.
pub fn convergence_study(
    alphas: &[f64],
    base: &Scenario,
) -> Result<Vec<ConvergenceRow>, ExperimentError> {
    let mut orders = alphas
        .iter()
        .map(|&a| FractionalOrder::new(a))
        .collect::<Result<Vec<_>, _>>()?;
    orders.sort_by(|a, b| a.value().total_cmp(&b.value()));
    orders.dedup();
    let game = base.game()?;
    let rows = orders
        .par_iter()
        .map(|&order| match base.with_order(order).run_on(&game) {
            Ok(run) => {
                let x = &run.report.equilibrium;
                ConvergenceRow {
                    alpha: order.value(),
                    t_adjacency: run.report.t_adjacency,
                    t_neighborhood: run.report.t_neighborhood,
                    last_strategy: Some(
                        (0..x.num_providers()).map(|i| x.last_strategy(i)).collect(),
                    ),
                    aborted: None,
                }
            }
            Err(e) => ConvergenceRow {
                alpha: order.value(),
                t_adjacency: None,
                t_neighborhood: None,
                last_strategy: None,
                aborted: Some(e.to_string()),
            },
        })
        .collect();
    Ok(rows)
}

/// Memory-kernel weight at one `(α, Δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRow {
    pub alpha: f64,
    pub delta: f64,
    /// Absent for the integer order, which has no memory.
    pub weight: Option<f64>,
}

/// Unit-amplitude kernel weights, `α`-major in the given order.
pub fn kernel_study(alphas: &[f64], deltas: &[f64]) -> Result<Vec<KernelRow>, ExperimentError> {
    let mut rows = Vec::with_capacity(alphas.len() * deltas.len());
    for &a in alphas {
        let kernel = MemoryKernel::new(FractionalOrder::new(a)?);
        for &delta in deltas {
            rows.push(KernelRow {
                alpha: a,
                delta,
                weight: kernel.weight(delta)?.value(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::SolverConfig;

    #[test]
    fn kernel_table_shape_and_positivity() {
        let rows = kernel_study(&[0.65, 1.0, 1.2], &[0.1, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows[3..6].iter().all(|r| r.weight.is_none()));
        assert!(rows.iter().filter_map(|r| r.weight).all(|w| w > 0.0));
        assert!(kernel_study(&[0.5], &[0.0]).is_err());
        assert!(kernel_study(&[2.0], &[1.0]).is_err());
    }

    #[test]
    fn convergence_rows_sorted() {
        let mut base = Scenario::reference();
        base.solver = SolverConfig::new(FractionalOrder::classical(), 0.05, 100);
        let rows = convergence_study(&[1.2, 0.8, 1.0, 0.8], &base).unwrap();
        let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
        assert_eq!(alphas, vec![0.8, 1.0, 1.2]);
    }
}
