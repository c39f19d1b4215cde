use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{Metered, Oracle};

/// Largest number of sets an exact-expectation round may enumerate.
pub const EXACT_ENUMERATION_LIMIT: usize = 200_000;

/// Draws `size` distinct elements of `pool` in draw order (Fisher–Yates prefix).
pub(crate) fn draw_ordered<R: Rng + ?Sized>(pool: &IndexSet, size: usize, rng: &mut R) -> Vec<usize> {
    assert!(
        size <= pool.len(),
        "sample size {size} exceeds pool size {}",
        pool.len()
    );
    let mut items = pool.as_slice().to_vec();
    let (chosen, _) = items.partial_shuffle(rng, size);
    chosen.to_vec()
}

/// Uniformly random `size`-subset of `pool`, drawn without replacement.
///
/// # Panics
/// If `size > |pool|`; callers clamp first.
pub fn sample_uniform_subset<R: Rng + ?Sized>(pool: &IndexSet, size: usize, rng: &mut R) -> IndexSet {
    IndexSet::from_unsorted(draw_ordered(pool, size, rng))
}

/// Result of one estimation round.
#[derive(Clone, Debug)]
pub(crate) struct Estimates {
    /// `f(S)`.
    pub base: f64,
    /// Estimate of `E[f_S(R)]`.
    pub set: f64,
    /// Estimates of `E[f_{S ∪ (R∖a)}(a)]`, aligned with the pool.
    pub elements: Vec<f64>,
    pub queries: u64,
}

fn union_with(s: &IndexSet, extra: impl IntoIterator<Item = usize>) -> IndexSet {
    s.union(&IndexSet::from_unsorted(extra))
}

/// One round of `m` shared draws.
///
/// For each draw `R_i` (in draw order `r_1, .., r_s`) the element context is
/// `R_i ∖ {a}` when `a ∈ R_i` and `{r_1, .., r_{s-1}}` otherwise; in both
/// cases it is a uniform `(s-1)`-subset of `pool ∖ {a}`.
pub(crate) fn sampled_round<R: Rng + ?Sized>(
    metered: &mut Metered<'_>,
    s: &IndexSet,
    f_s: Option<f64>,
    pool: &IndexSet,
    size: usize,
    m: usize,
    rng: &mut R,
) -> Result<Estimates> {
    let size = size.min(pool.len()).max(1);
    let draws: Vec<Vec<usize>> = (0..m).map(|_| draw_ordered(pool, size, rng)).collect();

    let mut sets = Vec::with_capacity(m * (pool.len() + 1) + 1);
    if f_s.is_none() {
        sets.push(s.clone());
    }
    let offset = sets.len();
    for r in &draws {
        sets.push(union_with(s, r.iter().copied()));
        for j in 0..size {
            sets.push(union_with(
                s,
                r.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x),
            ));
        }
        let prefix = &r[..size - 1];
        for &a in pool.iter() {
            if !r.contains(&a) {
                sets.push(union_with(s, prefix.iter().copied().chain([a])));
            }
        }
    }
    let values = metered.round(&sets)?;
    let base = f_s.unwrap_or(values[0]);

    let mut set_sum = 0.0;
    let mut elem_sum = vec![0.0; pool.len()];
    let mut cursor = offset;
    for r in &draws {
        let full = values[cursor];
        let drops = &values[cursor + 1..cursor + 1 + size];
        cursor += 1 + size;
        set_sum += full - base;
        let context = drops[size - 1];
        for (slot, &a) in pool.iter().enumerate() {
            match r.iter().position(|&x| x == a) {
                Some(j) => elem_sum[slot] += full - drops[j],
                None => {
                    elem_sum[slot] += values[cursor] - context;
                    cursor += 1;
                }
            }
        }
    }
    debug_assert_eq!(cursor, values.len());
    let mf = m as f64;
    Ok(Estimates {
        base,
        set: set_sum / mf,
        elements: elem_sum.into_iter().map(|v| v / mf).collect(),
        queries: sets.len() as u64,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// One round computing both expectations exactly by enumeration.
pub(crate) fn exact_round(
    metered: &mut Metered<'_>,
    s: &IndexSet,
    f_s: Option<f64>,
    pool: &IndexSet,
    size: usize,
) -> Result<Estimates> {
    let size = size.min(pool.len()).max(1);
    let count = binomial(pool.len(), size) + binomial(pool.len(), size - 1);
    if count > EXACT_ENUMERATION_LIMIT as f64 {
        return Err(Error::Size(format!(
            "exact expectation over a pool of {} with sets of {size} needs {count} queries (limit {EXACT_ENUMERATION_LIMIT})",
            pool.len()
        )));
    }
    let big: Vec<Vec<usize>> = pool.iter().copied().combinations(size).collect();
    let small: Vec<Vec<usize>> = pool.iter().copied().combinations(size - 1).collect();

    let mut sets = Vec::with_capacity(big.len() + small.len() + 1);
    if f_s.is_none() {
        sets.push(s.clone());
    }
    let offset = sets.len();
    sets.extend(big.iter().map(|r| union_with(s, r.iter().copied())));
    sets.extend(small.iter().map(|c| union_with(s, c.iter().copied())));
    let values = metered.round(&sets)?;
    let base = f_s.unwrap_or(values[0]);

    let big_vals = &values[offset..offset + big.len()];
    let small_vals = &values[offset + big.len()..];
    let lookup: HashMap<&[usize], f64> = big
        .iter()
        .map(|r| r.as_slice())
        .zip(big_vals.iter().copied())
        .collect();

    let set = big_vals.iter().map(|v| v - base).sum::<f64>() / big.len() as f64;
    let mut elements = Vec::with_capacity(pool.len());
    for &a in pool.iter() {
        let mut sum = 0.0;
        let mut terms = 0usize;
        let mut key = Vec::with_capacity(size);
        for (c, &fc) in small.iter().zip(small_vals) {
            if c.contains(&a) {
                continue;
            }
            key.clear();
            key.extend(c.iter().copied());
            let pos = key.partition_point(|&x| x < a);
            key.insert(pos, a);
            sum += lookup[key.as_slice()] - fc;
            terms += 1;
        }
        elements.push(if terms == 0 { 0.0 } else { sum / terms as f64 });
    }
    Ok(Estimates {
        base,
        set,
        elements,
        queries: sets.len() as u64,
    })
}

/// `(1/m) Σ f_S(R_i)` over `m` fresh draws of `size` elements from `pool`, as one round.
pub fn estimate_set_marginal<R: Rng + ?Sized>(
    oracle: &Oracle,
    s: &IndexSet,
    pool: &IndexSet,
    size: usize,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::config("samples must be at least 1"));
    }
    let size = size.min(pool.len());
    let mut sets = vec![s.clone()];
    for _ in 0..m {
        sets.push(union_with(s, draw_ordered(pool, size, rng)));
    }
    let v = oracle.eval_batch(&sets)?;
    Ok(v[1..].iter().map(|x| x - v[0]).sum::<f64>() / m as f64)
}

/// Per-element estimates of `E[f_{S ∪ (R∖a)}(a)]` from `m` shared draws, as one round.
pub fn estimate_element_marginals<R: Rng + ?Sized>(
    oracle: &Oracle,
    s: &IndexSet,
    pool: &IndexSet,
    size: usize,
    m: usize,
    rng: &mut R,
) -> Result<BTreeMap<usize, f64>> {
    if m == 0 {
        return Err(Error::config("samples must be at least 1"));
    }
    if pool.is_empty() {
        return Ok(BTreeMap::new());
    }
    let mut metered = Metered::new(oracle);
    let est = sampled_round(&mut metered, s, None, pool, size, m, rng)?;
    Ok(pool.iter().copied().zip(est.elements).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Modular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_distinct_members() {
        let pool = IndexSet::from_unsorted([2, 4, 6, 8, 10]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for size in 0..=5 {
            let r = sample_uniform_subset(&pool, size, &mut rng);
            assert_eq!(r.len(), size);
            assert!(r.is_subset(&pool));
        }
    }

    #[test]
    fn modular_element_estimates_are_exact() {
        let f = Oracle::new(Modular::new(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap());
        let pool = IndexSet::from_unsorted([0, 2, 3, 4]);
        let s = IndexSet::singleton(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = estimate_element_marginals(&f, &s, &pool, 2, 5, &mut rng).unwrap();
        for (a, v) in est {
            assert_eq!(v, (a + 1) as f64);
        }
        assert_eq!(f.rounds(), 1);
        assert_eq!(f.queries(), 1 + 5 * 5);
    }

    #[test]
    fn exact_round_matches_modular() {
        let f = Oracle::new(Modular::cardinality(6));
        let pool = IndexSet::full(6);
        let mut m = Metered::new(&f);
        let est = exact_round(&mut m, &IndexSet::empty(), Some(0.0), &pool, 3).unwrap();
        assert_eq!(est.set, 3.0);
        assert!(est.elements.iter().all(|&v| v == 1.0));
        assert_eq!(est.queries, 20 + 15);
    }
}
