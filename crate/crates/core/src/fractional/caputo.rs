use super::gamma::gamma_positive;
use super::{FractionalError, FractionalOrder};

/// Estimates the Caputo derivative of uniformly sampled values at every grid
/// point.
///
/// For `0 < α < 1` this is the L1 scheme: the derivative is taken piecewise
/// constant between samples and convolved with the exact kernel integrals.
/// For `1 < α < 2` the same scheme of order `α − 1` is applied to
/// second-order finite-difference estimates of the first derivative. `α = 1`
/// returns backward differences. The value at `t = 0` is zero for fractional
/// orders.
pub fn caputo_derivative_estimate(
    samples: &[f64],
    step: f64,
    order: FractionalOrder,
) -> Result<Vec<f64>, FractionalError> {
    let needed = (order.derivative_order() + 1).max(3);
    if samples.len() < needed {
        return Err(FractionalError::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    if !(step > 0.0) {
        return Err(FractionalError::InvalidConfig(format!(
            "grid step must be positive, got {step}"
        )));
    }
    let alpha = order.value();
    if order.is_integer() {
        let mut out = Vec::with_capacity(samples.len());
        out.push((samples[1] - samples[0]) / step);
        out.extend(samples.windows(2).map(|w| (w[1] - w[0]) / step));
        return Ok(out);
    }
    if alpha < 1.0 {
        return Ok(l1_scheme(samples, step, alpha));
    }

    let last = samples.len() - 1;
    let mut slope = Vec::with_capacity(samples.len());
    slope.push((-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * step));
    for m in 1..last {
        slope.push((samples[m + 1] - samples[m - 1]) / (2.0 * step));
    }
    slope.push((3.0 * samples[last] - 4.0 * samples[last - 1] + samples[last - 2]) / (2.0 * step));
    Ok(l1_scheme(&slope, step, alpha - 1.0))
}

fn l1_scheme(values: &[f64], step: f64, beta: f64) -> Vec<f64> {
    let scale = step.powf(-beta) / gamma_positive(2.0 - beta);
    let weights: Vec<f64> = (0..values.len())
        .map(|j| ((j + 1) as f64).powf(1.0 - beta) - (j as f64).powf(1.0 - beta))
        .collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; values.len()];
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let acc: f64 = (0..m).map(|j| weights[j] * diffs[m - 1 - j]).sum();
        *slot = scale * acc;
    }
    out
}
