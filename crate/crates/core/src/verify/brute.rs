use itertools::Itertools;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::Oracle;

/// Largest number of sets brute-force enumeration will evaluate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive maximum of `f` over all sets of size at most `k`.
///
/// Each size is one round. Ties go to the lexicographically smallest set.
pub fn brute_force_opt(oracle: &Oracle, k: usize) -> Result<(IndexSet, f64)> {
    let n = oracle.ground_size();
    let k = k.min(n);
    let count: f64 = (0..=k).map(|j| binomial(n, j)).sum();
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::Size(format!(
            "brute force over {count} subsets of {n} elements exceeds the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut best = (IndexSet::empty(), f64::NEG_INFINITY);
    for size in 0..=k {
        let sets: Vec<IndexSet> = (0..n)
            .combinations(size)
            .map(IndexSet::from_unsorted)
            .collect();
        let values = oracle.eval_batch(&sets)?;
        for (s, v) in sets.into_iter().zip(values) {
            if v > best.1 || (v == best.1 && s < best.0) {
                best = (s, v);
            }
        }
    }
    Ok(best)
}

/// `f` on every subset of a ground set of at most 20 elements, indexed by bitmask.
pub(crate) fn all_values(oracle: &Oracle, max_size: usize) -> Result<Vec<Option<f64>>> {
    let n = oracle.ground_size();
    if n > 20 {
        return Err(Error::Size(format!(
            "exhaustive enumeration needs n <= 20, got {n}"
        )));
    }
    let masks: Vec<u64> = (0..1u64 << n)
        .filter(|m| m.count_ones() as usize <= max_size)
        .collect();
    if masks.len() as f64 > BRUTE_FORCE_LIMIT {
        return Err(Error::Size(format!(
            "{} subsets exceed the limit of {BRUTE_FORCE_LIMIT}",
            masks.len()
        )));
    }
    let sets: Vec<IndexSet> = masks.iter().map(|&m| IndexSet::from_mask(m)).collect();
    let values = oracle.eval_batch(&sets)?;
    let mut table = vec![None; 1 << n];
    for (m, v) in masks.into_iter().zip(values) {
        table[m as usize] = Some(v);
    }
    Ok(table)
}
