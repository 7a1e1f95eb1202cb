use super::EvolutionError;
use crate::game::MixedStrategyProfile;

/// Clamps negative entries to zero and renormalises each provider block in
/// place. Returns the L1 size of the correction.
pub fn project_simplex_in_place(
    values: &mut [f64],
    offsets: &[usize],
) -> Result<f64, EvolutionError> {
    let mut moved = 0.0;
    for (provider, w) in offsets.windows(2).enumerate() {
        let block = &mut values[w[0]..w[1]];
        let mut sum = 0.0;
        for v in block.iter_mut() {
            if !v.is_finite() {
                return Err(EvolutionError::InvalidInput(format!(
                    "non-finite entry in block {provider}"
                )));
            }
            if *v < 0.0 {
                moved += -*v;
                *v = 0.0;
            }
            sum += *v;
        }
        if sum <= 0.0 {
            return Err(EvolutionError::EmptyBlock { provider });
        }
        if sum != 1.0 {
            for v in block.iter_mut() {
                let scaled = *v / sum;
                moved += (scaled - *v).abs();
                *v = scaled;
            }
        }
    }
    Ok(moved)
}

/// Maps a raw vector laid out in blocks of `shape[i]` entries onto the
/// product of simplices.
pub fn project_simplex(
    raw: &[f64],
    shape: &[usize],
) -> Result<MixedStrategyProfile, EvolutionError> {
    let total: usize = shape.iter().sum();
    if raw.len() != total {
        return Err(EvolutionError::InvalidInput(format!(
            "vector of length {} does not match block sizes {shape:?}",
            raw.len()
        )));
    }
    let mut values = raw.to_vec();
    let mut offsets = vec![0];
    for s in shape {
        offsets.push(offsets.last().unwrap() + s);
    }
    project_simplex_in_place(&mut values, &offsets)?;
    let blocks = offsets
        .windows(2)
        .map(|w| values[w[0]..w[1]].to_vec())
        .collect();
    Ok(MixedStrategyProfile::from_blocks_unchecked(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valid_profile_is_unchanged() {
        let raw = [0.2, 0.3, 0.5, 1.0];
        let x = project_simplex(&raw, &[3, 1]).unwrap();
        assert_eq!(x.as_flat(), &raw);
    }

    #[test]
    fn clamp_then_normalise() {
        let x = project_simplex(&[-0.01, 0.51, 0.50], &[3]).unwrap();
        assert_eq!(x.get(0, 0), 0.0);
        assert!((x.get(0, 1) - 0.51 / 1.01).abs() < 1e-15);
        assert!((x.get(0, 2) - 0.50 / 1.01).abs() < 1e-15);
        assert!((x.get(0, 1) - 0.504_950_495).abs() < 1e-9);
    }

    #[test]
    fn all_zero_block_rejected() {
        assert_eq!(
            project_simplex(&[0.5, 0.5, 0.0, 0.0, 0.0], &[2, 3]).unwrap_err(),
            EvolutionError::EmptyBlock { provider: 1 }
        );
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(raw in proptest::collection::vec(-0.2f64..1.0, 7)) {
            prop_assume!(raw[..3].iter().any(|&v| v > 0.0) && raw[3..].iter().any(|&v| v > 0.0));
            let once = project_simplex(&raw, &[3, 4]).unwrap();
            let twice = project_simplex(once.as_flat(), &[3, 4]).unwrap();
            for (a, b) in once.as_flat().iter().zip(twice.as_flat()) {
                prop_assert!((a - b).abs() < 1e-15);
            }
            for block in once.blocks() {
                prop_assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(block.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
