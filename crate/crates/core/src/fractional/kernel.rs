use serde::{Deserialize, Serialize};

use super::gamma::gamma_positive;
use super::{FractionalError, FractionalOrder};

/// Power-law fading memory `M(Δ) = B Δ^{n−1−α} / Γ(n−α)` of a Caputo
/// derivative of order `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryKernel {
    pub order: FractionalOrder,
    pub amplitude: f64,
}

/// Kernel value at a time gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryWeight {
    /// Weight of a genuinely fractional order.
    Fading(f64),
    /// Integer order: the Caputo derivative is the ordinary derivative and
    /// carries no memory.
    IntegerOrder,
}

impl MemoryWeight {
    pub fn value(self) -> Option<f64> {
        match self {
            MemoryWeight::Fading(v) => Some(v),
            MemoryWeight::IntegerOrder => None,
        }
    }
}

impl MemoryKernel {
    pub fn new(order: FractionalOrder) -> Self {
        Self {
            order,
            amplitude: 1.0,
        }
    }

    pub fn with_amplitude(order: FractionalOrder, amplitude: f64) -> Self {
        Self { order, amplitude }
    }

    pub fn weight(&self, gap: f64) -> Result<MemoryWeight, FractionalError> {
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(FractionalError::NonPositiveGap(gap));
        }
        if self.order.is_integer() {
            return Ok(MemoryWeight::IntegerOrder);
        }
        let alpha = self.order.value();
        let n = self.order.derivative_order() as f64;
        let exponent = n - 1.0 - alpha;
        Ok(MemoryWeight::Fading(
            self.amplitude * gap.powf(exponent) / gamma_positive(n - alpha),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(alpha: f64) -> MemoryKernel {
        MemoryKernel::new(FractionalOrder::new(alpha).unwrap())
    }

    #[test]
    fn integer_order_is_degenerate() {
        assert_eq!(kernel(1.0).weight(0.3).unwrap(), MemoryWeight::IntegerOrder);
    }

    #[test]
    fn half_order_unit_gap() {
        let w = kernel(0.5).weight(1.0).unwrap().value().unwrap();
        assert!((w - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((w - 0.564_189_6).abs() < 1e-7);
    }

    #[test]
    fn recent_past_amplified_for_lower_order() {
        let a = kernel(0.65).weight(0.1).unwrap().value().unwrap();
        let b = kernel(0.8).weight(0.1).unwrap().value().unwrap();
        assert!(a > b);
    }

    #[test]
    fn subdiffusive_curves_cross_near_two_hundredths() {
        // Δ^{0.15} Γ(0.2)/Γ(0.35) = 1 at Δ ≈ 0.0196; below it α = 0.8 weighs more.
        let w = |a: f64, d: f64| kernel(a).weight(d).unwrap().value().unwrap();
        assert!(w(0.65, 0.01) < w(0.8, 0.01));
        assert!(w(0.65, 0.03) > w(0.8, 0.03));
    }

    #[test]
    fn weight_decreases_in_order_beyond_unit_gap() {
        for &gap in &[1.0, 2.0, 5.0] {
            for branch in [(0.05, 0.95), (1.05, 1.95)] {
                let mut previous = f64::INFINITY;
                let mut a = branch.0;
                while a <= branch.1 {
                    let w = kernel(a).weight(gap).unwrap().value().unwrap();
                    assert!(w < previous, "gap {gap}, alpha {a}");
                    previous = w;
                    a += 0.05;
                }
            }
        }
    }

    #[test]
    fn amplitude_scales_linearly() {
        let order = FractionalOrder::new(0.7).unwrap();
        let a = MemoryKernel::new(order)
            .weight(0.2)
            .unwrap()
            .value()
            .unwrap();
        let b = MemoryKernel::with_amplitude(order, 3.0)
            .weight(0.2)
            .unwrap()
            .value()
            .unwrap();
        assert!((3.0 * a - b).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_gap() {
        assert!(kernel(0.5).weight(0.0).is_err());
        assert!(kernel(1.5).weight(-1.0).is_err());
    }

    #[test]
    fn weight_fades_with_gap() {
        let k = kernel(0.8);
        let near = k.weight(0.1).unwrap().value().unwrap();
        let far = k.weight(10.0).unwrap().value().unwrap();
        assert!(near > far && far > 0.0);
    }
}
