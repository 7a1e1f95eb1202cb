//! Fractional Adams–Bashforth–Moulton predictor–corrector.
//!
//! Integrates `D^α x = φ(x)` (Caputo) through its Volterra form
//! `x(t) = Σ_{m<n} t^m x^{(m)}(0)/m! + Γ(α)^{-1} ∫₀ᵗ (t−s)^{α−1} φ(x(s)) ds`
//! on a uniform grid. The predictor is the product rectangle rule and the
//! corrector the product trapezoidal rule, applied either as a fixed number
//! of explicit passes (PECE) or solved to convergence with Newton's method
//! for stiff fields.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::gamma::gamma_positive;
use super::{FractionalError, FractionalOrder};

fn default_corrector_iterations() -> usize {
    1
}

/// Newton iterations allowed per step before the step is rejected.
const NEWTON_MAX_ITERATIONS: usize = 30;
/// Relative size of the final Newton update that counts as converged.
const NEWTON_TOLERANCE: f64 = 1e-12;
/// Step halvings tried by the damped Newton update.
const NEWTON_MAX_HALVINGS: usize = 12;

/// How the implicit corrector equation is handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corrector {
    /// `corrector_iterations` explicit evaluations of the corrector.
    #[default]
    FixedPoint,
    /// Newton's method with a finite-difference Jacobian, iterated until the
    /// update is negligible. Stable for stiff fields at the cost of
    /// `dim + 1` field evaluations per iteration.
    Newton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(rename = "alpha")]
    pub order: FractionalOrder,
    /// Length `T` of the time domain `[0, T]`.
    pub horizon: f64,
    /// Number of uniform steps `N`.
    pub steps: usize,
    #[serde(default)]
    pub corrector: Corrector,
    /// Number of passes for [`Corrector::FixedPoint`]; unused by Newton.
    #[serde(default = "default_corrector_iterations")]
    pub corrector_iterations: usize,
    /// Keep only the most recent steps in the memory integral.
    #[serde(default)]
    pub memory_truncation: Option<usize>,
    /// `x'(0)` for `1 < α < 2`; zero when absent.
    #[serde(default)]
    pub initial_derivative: Option<Vec<f64>>,
}

impl SolverConfig {
    pub fn new(order: FractionalOrder, horizon: f64, steps: usize) -> Self {
        Self {
            order,
            horizon,
            steps,
            corrector: Corrector::FixedPoint,
            corrector_iterations: 1,
            memory_truncation: None,
            initial_derivative: None,
        }
    }

    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn with_corrector(&self, corrector: Corrector) -> Self {
        Self {
            corrector,
            ..self.clone()
        }
    }

    pub fn with_order(&self, order: FractionalOrder) -> Self {
        Self {
            order,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), FractionalError> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(FractionalError::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.steps < 2 {
            return Err(FractionalError::InvalidConfig(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        if self.corrector_iterations < 1 {
            return Err(FractionalError::InvalidConfig(
                "corrector_iterations must be at least 1".into(),
            ));
        }
        if self.memory_truncation == Some(0) {
            return Err(FractionalError::InvalidConfig(
                "memory_truncation window must be at least one step".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Max-norm change made by the last corrector pass at each step
    /// (zero at `t = 0`).
    pub corrector_residuals: Vec<f64>,
}

impl FdeSolution {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("solution has at least one state")
    }
}

/// Solves the initial value problem for an autonomous field `rhs(x, out)`.
pub fn solve_fde_ivp<F>(
    rhs: F,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<FdeSolution, FractionalError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    solve_fde_ivp_with_hook(rhs, x0, config, |_, _| Ok(()))
}

/// As [`solve_fde_ivp`], but `hook(step, state)` may adjust each accepted
/// state before it enters the memory (for example a projection). An `Err`
/// aborts the solve at that step.
///
/// Adjustments persist: each one is carried forward as a shift of the
/// initial-condition term, so later steps start from the adjusted state
/// rather than silently undoing it.
pub fn solve_fde_ivp_with_hook<F, H>(
    mut rhs: F,
    x0: &[f64],
    config: &SolverConfig,
    mut hook: H,
) -> Result<FdeSolution, FractionalError>
where
    F: FnMut(&[f64], &mut [f64]),
    H: FnMut(usize, &mut [f64]) -> Result<(), String>,
{
    config.validate()?;
    let dim = x0.len();
    let alpha = config.order.value();
    let n_steps = config.steps;
    let h = config.step_size();

    let derivative0 = match (&config.initial_derivative, config.order.derivative_order()) {
        (Some(d), 2) => {
            if d.len() != dim {
                return Err(FractionalError::InvalidConfig(format!(
                    "initial_derivative has {} entries, state has {dim}",
                    d.len()
                )));
            }
            Some(d.clone())
        }
        _ => None,
    };
    let taylor = |t: f64, out: &mut [f64]| {
        out.copy_from_slice(x0);
        if let Some(d) = &derivative0 {
            for (o, v) in out.iter_mut().zip(d) {
                *o += t * v;
            }
        }
    };

    let h_alpha = h.powf(alpha);
    let predictor_scale = h_alpha / gamma_positive(alpha + 1.0);
    let corrector_scale = h_alpha / gamma_positive(alpha + 2.0);
    // Weights indexed by lag d = k − j.
    let predictor_w: Vec<f64> = (0..n_steps)
        .map(|d| ((d + 1) as f64).powf(alpha) - (d as f64).powf(alpha))
        .collect();
    let corrector_w: Vec<f64> = (0..n_steps)
        .map(|d| {
            let d = d as f64;
            (d + 2.0).powf(alpha + 1.0) + d.powf(alpha + 1.0) - 2.0 * (d + 1.0).powf(alpha + 1.0)
        })
        .collect();

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut residuals = Vec::with_capacity(n_steps + 1);
    let mut history = Vec::with_capacity((n_steps + 1) * dim);

    let mut field = vec![0.0; dim];
    rhs(x0, &mut field);
    if field.iter().any(|v| !v.is_finite()) {
        return Err(FractionalError::NonFinite { step: 0 });
    }
    history.extend_from_slice(&field);
    times.push(0.0);
    states.push(x0.to_vec());
    residuals.push(0.0);

    let mut base = vec![0.0; dim];
    let mut predictor_sum = vec![0.0; dim];
    let mut corrector_sum = vec![0.0; dim];
    let mut state = x0.to_vec();
    let mut previous = vec![0.0; dim];
    let mut shift = vec![0.0; dim];
    let mut newton = NewtonWorkspace::new(dim);

    for k in 0..n_steps {
        let step = k + 1;
        let t_next = step as f64 * h;
        let oldest = config
            .memory_truncation
            .map_or(0, |w| (k + 1).saturating_sub(w));

        predictor_sum.iter_mut().for_each(|v| *v = 0.0);
        corrector_sum.iter_mut().for_each(|v| *v = 0.0);
        for j in oldest..=k {
            let f_j = &history[j * dim..(j + 1) * dim];
            let pw = predictor_w[k - j];
            let cw = if j == 0 {
                let kf = k as f64;
                kf.powf(alpha + 1.0) - (kf - alpha) * (kf + 1.0).powf(alpha)
            } else {
                corrector_w[k - j]
            };
            for d in 0..dim {
                predictor_sum[d] += pw * f_j[d];
                corrector_sum[d] += cw * f_j[d];
            }
        }

        taylor(t_next, &mut base);
        for (b, s) in base.iter_mut().zip(&shift) {
            *b += s;
        }
        // Newton starts from the last accepted state instead: on stiff fields
        // the explicit predictor can land far outside the region of interest.
        if config.corrector == Corrector::FixedPoint {
            for d in 0..dim {
                state[d] = base[d] + predictor_scale * predictor_sum[d];
            }
        }
        let mut residual = 0.0;
        match config.corrector {
            Corrector::FixedPoint => {
                for _ in 0..config.corrector_iterations {
                    rhs(&state, &mut field);
                    previous.copy_from_slice(&state);
                    for d in 0..dim {
                        state[d] = base[d] + corrector_scale * (corrector_sum[d] + field[d]);
                    }
                    residual = state
                        .iter()
                        .zip(&previous)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                }
            }
            Corrector::Newton => {
                residual = newton_corrector(
                    &mut rhs,
                    &mut state,
                    &base,
                    &corrector_sum,
                    corrector_scale,
                    &mut newton,
                )
                .map_err(|residual| FractionalError::CorrectorDiverged { step, residual })?;
            }
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(FractionalError::NonFinite { step });
        }
        previous.copy_from_slice(&state);
        hook(step, &mut state)
            .map_err(|message| FractionalError::StepRejected { step, message })?;
        for d in 0..dim {
            shift[d] += state[d] - previous[d];
        }

        rhs(&state, &mut field);
        if field.iter().any(|v| !v.is_finite()) {
            return Err(FractionalError::NonFinite { step });
        }
        history.extend_from_slice(&field);
        times.push(t_next);
        states.push(state.clone());
        residuals.push(residual);
    }

    Ok(FdeSolution {
        times,
        states,
        corrector_residuals: residuals,
    })
}

struct NewtonWorkspace {
    field: Vec<f64>,
    probe: Vec<f64>,
    probe_field: Vec<f64>,
    jacobian: DMatrix<f64>,
    defect: DVector<f64>,
}

impl NewtonWorkspace {
    fn new(dim: usize) -> Self {
        Self {
            field: vec![0.0; dim],
            probe: vec![0.0; dim],
            probe_field: vec![0.0; dim],
            jacobian: DMatrix::zeros(dim, dim),
            defect: DVector::zeros(dim),
        }
    }
}

/// Solves `x = base + scale·(sum + φ(x))` starting from the predictor in
/// `state`. Returns the size of the last update, or the last defect norm when
/// the iteration fails to converge.
fn newton_corrector<F>(
    rhs: &mut F,
    state: &mut [f64],
    base: &[f64],
    sum: &[f64],
    scale: f64,
    ws: &mut NewtonWorkspace,
) -> Result<f64, f64>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let dim = state.len();
    let mut last_defect = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        rhs(state, &mut ws.field);
        for d in 0..dim {
            ws.defect[d] = state[d] - base[d] - scale * (sum[d] + ws.field[d]);
        }
        last_defect = ws.defect.amax();
        for c in 0..dim {
            let eps = 1e-7 * state[c].abs().max(1.0);
            ws.probe.copy_from_slice(state);
            ws.probe[c] += eps;
            rhs(&ws.probe, &mut ws.probe_field);
            for r in 0..dim {
                let identity = if r == c { 1.0 } else { 0.0 };
                ws.jacobian[(r, c)] = identity - scale * (ws.probe_field[r] - ws.field[r]) / eps;
            }
        }
        let update = ws
            .jacobian
            .clone()
            .lu()
            .solve(&ws.defect)
            .ok_or(last_defect)?;
        if update.iter().any(|u| !u.is_finite()) {
            return Err(last_defect);
        }
        // Damped step: halve the update until the defect decreases.
        ws.probe.copy_from_slice(state);
        let mut fraction = 1.0;
        for _ in 0..NEWTON_MAX_HALVINGS {
            for d in 0..dim {
                state[d] = ws.probe[d] - fraction * update[d];
            }
            rhs(state, &mut ws.probe_field);
            let trial = (0..dim)
                .map(|d| (state[d] - base[d] - scale * (sum[d] + ws.probe_field[d])).abs())
                .fold(0.0, f64::max);
            if trial < last_defect || trial == 0.0 {
                break;
            }
            fraction *= 0.5;
        }
        let mut size = 0.0_f64;
        let mut magnitude = 0.0_f64;
        for d in 0..dim {
            size = size.max((fraction * update[d]).abs());
            magnitude = magnitude.max(state[d].abs());
        }
        if size <= NEWTON_TOLERANCE * (1.0 + magnitude) {
            return Ok(size);
        }
    }
    Err(last_defect)
}
