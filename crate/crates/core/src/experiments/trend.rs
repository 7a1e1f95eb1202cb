use serde::Serialize;

/// Expected direction of a series along an increasing grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    Nondecreasing,
    Nonincreasing,
}

/// Outcome of a monotonicity check with a noise allowance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendCheck {
    pub trend: Trend,
    /// Indices `s` where the step `s → s+1` goes against the trend.
    pub violations: Vec<usize>,
    /// Size of the largest step against the trend.
    pub worst: f64,
    pub passed: bool,
}

/// Passes when at most `allowed` steps go against `trend`, each by no more
/// than `tolerance`.
pub fn check_trend(series: &[f64], trend: Trend, allowed: usize, tolerance: f64) -> TrendCheck {
    let mut violations = Vec::new();
    let mut worst = 0.0_f64;
    for (s, w) in series.windows(2).enumerate() {
        let against = match trend {
            Trend::Nondecreasing => w[0] - w[1],
            Trend::Nonincreasing => w[1] - w[0],
        };
        if against > 0.0 {
            violations.push(s);
            worst = worst.max(against);
        }
    }
    let passed = violations.len() <= allowed && worst <= tolerance;
    TrendCheck {
        trend,
        violations,
        worst,
        passed,
    }
}
