//! Worker placement and first-`k` recovery distributions.
//!
//! Both are multivariate hypergeometric: `n` workers are drawn without
//! replacement from the pooled federation, then the first `k` results are a
//! uniform `k`-subset of those `n`.

use std::sync::OnceLock;

use super::{GameError, PureStrategyProfile};
use crate::combinatorics::{for_each_bounded_composition, LogFactorials};

pub(crate) fn log_factorials() -> &'static LogFactorials {
    static TABLE: OnceLock<LogFactorials> = OnceLock::new();
    TABLE.get_or_init(LogFactorials::new)
}

/// One joint outcome with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub counts: Vec<usize>,
    pub probability: f64,
}

fn multivariate_hypergeometric(pools: &[usize], draws: usize) -> Vec<Outcome> {
    let lf = log_factorials();
    let total: usize = pools.iter().sum();
    if draws > total {
        return Vec::new();
    }
    let ln_norm = lf.ln_binomial(total, draws);
    let mut out = Vec::new();
    for_each_bounded_composition(pools, draws, |counts| {
        let ln_num: f64 = pools
            .iter()
            .zip(counts)
            .map(|(&pool, &c)| lf.ln_binomial(pool, c))
            .sum();
        out.push(Outcome {
            counts: counts.to_vec(),
            probability: (ln_num - ln_norm).exp(),
        });
    });
    out
}

/// Distribution of the placement `ñ` of an `n`-worker request over the
/// providers' contributed workers `l`. Empty when the federation holds fewer
/// than `n` workers.
pub fn joint_assignment_pmf(l: &PureStrategyProfile, n: usize) -> Vec<Outcome> {
    multivariate_hypergeometric(l.counts(), n)
}

/// Distribution of how many of the first `k` returned results come from each
/// provider, given placement `ñ`.
pub fn recovery_pmf(placement: &[usize], k: usize) -> Result<Vec<Outcome>, GameError> {
    let available: usize = placement.iter().sum();
    if available < k {
        return Err(GameError::Unrecoverable {
            available,
            required: k,
        });
    }
    Ok(multivariate_hypergeometric(placement, k))
}
