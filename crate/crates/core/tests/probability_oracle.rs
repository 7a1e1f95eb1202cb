//! Placement and recovery distributions against brute-force enumeration of
//! labeled workers: every subset of pooled workers is equally likely to be
//! assigned, and every subset of assigned workers equally likely to finish
//! first.

use std::collections::BTreeMap;

use cef_core::game::{joint_assignment_pmf, recovery_pmf, Outcome, PureStrategyProfile};

/// Distribution of per-group counts when `draw` of the labeled items are
/// chosen uniformly; `groups[g]` items belong to group `g`.
fn enumerate_labeled(groups: &[usize], draw: usize) -> BTreeMap<Vec<usize>, f64> {
    let total: usize = groups.iter().sum();
    let owner: Vec<usize> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, &c)| std::iter::repeat(g).take(c))
        .collect();
    let mut counts = BTreeMap::new();
    let mut subsets = 0u64;
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != draw {
            continue;
        }
        let mut per_group = vec![0; groups.len()];
        for (bit, &g) in owner.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                per_group[g] += 1;
            }
        }
        *counts.entry(per_group).or_insert(0u64) += 1;
        subsets += 1;
    }
    counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / subsets as f64))
        .collect()
}

fn as_map(outcomes: &[Outcome]) -> BTreeMap<Vec<usize>, f64> {
    outcomes
        .iter()
        .filter(|o| o.probability > 0.0)
        .map(|o| (o.counts.clone(), o.probability))
        .collect()
}

fn assert_same(actual: &BTreeMap<Vec<usize>, f64>, expected: &BTreeMap<Vec<usize>, f64>) {
    assert_eq!(
        actual.keys().collect::<Vec<_>>(),
        expected.keys().collect::<Vec<_>>()
    );
    for (k, p) in expected {
        assert!(
            (actual[k] - p).abs() <= 1e-12,
            "{k:?}: {} vs {p}",
            actual[k]
        );
    }
}

#[test]
fn placement_matches_labeled_enumeration() {
    for l1 in 0..=6 {
        for l2 in 0..=6 {
            let profile = PureStrategyProfile(vec![l1, l2]);
            for n in 1..=12 {
                let pmf = joint_assignment_pmf(&profile, n);
                if l1 + l2 < n {
                    assert!(pmf.is_empty(), "infeasible ({l1},{l2}) n={n}");
                    continue;
                }
                let sum: f64 = pmf.iter().map(|o| o.probability).sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                assert_same(&as_map(&pmf), &enumerate_labeled(&[l1, l2], n));
            }
        }
    }
}

#[test]
fn recovery_matches_labeled_enumeration() {
    for n in 1..=12 {
        for a in 0..=n.min(6) {
            let placement = [a, n - a];
            for k in 1..=n {
                let pmf = recovery_pmf(&placement, k).unwrap();
                let sum: f64 = pmf.iter().map(|o| o.probability).sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                assert_same(&as_map(&pmf), &enumerate_labeled(&placement, k));
            }
        }
    }
}

#[test]
fn three_provider_placement() {
    let profile = PureStrategyProfile(vec![3, 2, 4]);
    for n in 1..=9 {
        let pmf = joint_assignment_pmf(&profile, n);
        assert_same(&as_map(&pmf), &enumerate_labeled(&[3, 2, 4], n));
    }
}

#[test]
fn recovery_rejects_short_placement() {
    assert!(recovery_pmf(&[1, 1], 3).is_err());
}
