use crate::game::{Game, MixedStrategyProfile};

/// Deterministic quasi-random profiles covering the product of simplices.
///
/// Uses the additive recurrence with generalized golden-ratio increments
/// (the R_d sequence) on the unit cube, then maps each provider block to its
/// simplex through sorted uniform spacings.
pub fn simplex_samples(game: &Game, count: usize) -> Vec<MixedStrategyProfile> {
    let counts = game.strategy_counts();
    let dims: usize = counts.iter().map(|c| c - 1).sum();
    let phi = generalized_golden_ratio(dims);
    let increments: Vec<f64> = (1..=dims).map(|d| phi.powi(-(d as i32)).fract()).collect();

    (1..=count)
        .map(|k| {
            let point: Vec<f64> = increments
                .iter()
                .map(|a| (0.5 + k as f64 * a).fract())
                .collect();
            let mut cursor = 0;
            let blocks = counts
                .iter()
                .map(|&c| {
                    let mut cuts: Vec<f64> = point[cursor..cursor + c - 1].to_vec();
                    cursor += c - 1;
                    cuts.sort_by(f64::total_cmp);
                    let mut block = Vec::with_capacity(c);
                    let mut prev = 0.0;
                    for cut in cuts {
                        block.push(cut - prev);
                        prev = cut;
                    }
                    block.push(1.0 - prev);
                    block
                })
                .collect();
            MixedStrategyProfile::from_blocks(blocks).expect("spacings lie on the simplex")
        })
        .collect()
}

/// Unique positive root of `x^{d+1} = x + 1`.
fn generalized_golden_ratio(dims: usize) -> f64 {
    let mut x = 2.0_f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (dims as f64 + 1.0));
    }
    x
}

/// `‖φ(x) − φ(y)‖₁ / ‖x − y‖₁`.
pub fn lipschitz_ratio_l1(
    game: &Game,
    x: &MixedStrategyProfile,
    y: &MixedStrategyProfile,
    gamma: f64,
) -> f64 {
    let fx = game.replicator_rhs(x, gamma);
    let fy = game.replicator_rhs(y, gamma);
    let num: f64 = fx.iter().zip(&fy).map(|(a, b)| (a - b).abs()).sum();
    num / x.l1_distance(y)
}

/// `‖φ(x) − φ(y)‖∞ / ‖x − y‖₁`: the per-component constant.
pub fn lipschitz_ratio_sup(
    game: &Game,
    x: &MixedStrategyProfile,
    y: &MixedStrategyProfile,
    gamma: f64,
) -> f64 {
    let fx = game.replicator_rhs(x, gamma);
    let fy = game.replicator_rhs(y, gamma);
    let num = fx
        .iter()
        .zip(&fy)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    num / x.l1_distance(y)
}

/// Empirical Lipschitz constant of the replicator field: the largest L1
/// ratio over `sample_count` consecutive pairs of quasi-random profiles.
pub fn estimate_lipschitz(game: &Game, gamma: f64, sample_count: usize) -> f64 {
    let samples = simplex_samples(game, 2 * sample_count.max(2));
    samples
        .chunks_exact(2)
        .map(|pair| lipschitz_ratio_l1(game, &pair[0], &pair[1], gamma))
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max)
}
