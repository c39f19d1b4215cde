//! Reference selectors: greedy, query-parallel greedy, top-k and random.

use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{build_pool, Metered, Oracle};
use crate::solver::{sample_uniform_subset, RoundKind, RoundRecord, RunTrace, SelectionResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Greedy,
    GreedyParallel,
    TopK,
    Random,
}

impl BaselineKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineKind::Greedy => "greedy",
            BaselineKind::GreedyParallel => "greedy_parallel",
            BaselineKind::TopK => "top_k",
            BaselineKind::Random => "random",
        }
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(BaselineKind::Greedy),
            "greedy_parallel" => Ok(BaselineKind::GreedyParallel),
            "top_k" | "topk" => Ok(BaselineKind::TopK),
            "random" => Ok(BaselineKind::Random),
            other => Err(Error::config(format!("unknown baseline '{other}'"))),
        }
    }
}

fn check_budget(oracle: &Oracle, k: usize) -> Result<()> {
    let n = oracle.ground_size();
    if k > n {
        return Err(Error::Size(format!(
            "budget k = {k} exceeds the ground set size {n}"
        )));
    }
    Ok(())
}

fn record(round: u64, kind: RoundKind, pool_size: usize, value: f64, size: usize, queries: u64) -> RoundRecord {
    RoundRecord {
        round,
        kind,
        outer: 0,
        pool_size,
        value,
        selected_size: size,
        estimate: None,
        t: None,
        set_threshold: None,
        element_threshold: None,
        queries,
    }
}

fn finish(algorithm: &str, selected: IndexSet, value: f64, mut trace: RunTrace, m: &Metered<'_>, start: Instant) -> SelectionResult {
    trace.total_queries = m.tally.queries;
    trace.adaptive_rounds = m.tally.rounds;
    trace.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    trace.runs = 1;
    SelectionResult {
        algorithm: algorithm.to_string(),
        selected,
        value,
        trace,
        params_echo: None,
    }
}

/// Standard greedy: each round adds the element of largest marginal gain.
///
/// Ties go to the lowest index. Stops early when no marginal is positive.
pub fn greedy_sds_ma(oracle: &Oracle, k: usize) -> Result<SelectionResult> {
    greedy_impl(Metered::on_pool(oracle, None), k, "greedy")
}

/// Greedy with each round's candidate queries spread over `workers` threads.
///
/// The selection is identical to [`greedy_sds_ma`] for every worker count.
pub fn greedy_parallel(oracle: &Oracle, k: usize, workers: usize) -> Result<SelectionResult> {
    let pool = build_pool(workers)?;
    greedy_impl(Metered::on_pool(oracle, pool.as_deref()), k, "greedy_parallel")
}

fn greedy_impl(mut m: Metered<'_>, k: usize, name: &str) -> Result<SelectionResult> {
    check_budget(m.oracle, k)?;
    let start = Instant::now();
    let n = m.oracle.ground_size();
    let mut trace = RunTrace::default();
    let mut s = IndexSet::empty();
    let mut f_s: Option<f64> = None;
    while s.len() < k {
        let candidates: Vec<usize> = (0..n).filter(|&a| !s.contains(a)).collect();
        let mut sets: Vec<IndexSet> = Vec::with_capacity(candidates.len() + 1);
        if f_s.is_none() {
            sets.push(s.clone());
        }
        let offset = sets.len();
        sets.extend(candidates.iter().map(|&a| s.with(a)));
        let values = m.round(&sets)?;
        let base = f_s.unwrap_or_else(|| values[0]);
        let mut best: Option<(usize, f64)> = None;
        for (&a, &v) in candidates.iter().zip(&values[offset..]) {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((a, v));
            }
        }
        let (a, v) = best.expect("candidates are nonempty while |S| < k <= n");
        if v - base <= 0.0 {
            f_s = Some(base);
            trace.rounds.push(record(m.tally.rounds, RoundKind::Singletons, candidates.len(), base, s.len(), sets.len() as u64));
            break;
        }
        s = s.with(a);
        f_s = Some(v);
        trace.rounds.push(record(m.tally.rounds, RoundKind::Singletons, candidates.len(), v, s.len(), sets.len() as u64));
    }
    let value = match f_s {
        Some(v) => v,
        None => m.report(&s)?,
    };
    Ok(finish(name, s, value, trace, &m, start))
}

/// The `k` elements of largest `f({a})`, from one round of singleton queries.
pub fn top_k(oracle: &Oracle, k: usize) -> Result<SelectionResult> {
    check_budget(oracle, k)?;
    let start = Instant::now();
    let mut m = Metered::new(oracle);
    let n = oracle.ground_size();
    let mut trace = RunTrace::default();
    let singles: Vec<IndexSet> = (0..n).map(IndexSet::singleton).collect();
    let values = m.round(&singles)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let s = IndexSet::from_unsorted(order.into_iter().take(k));
    let value = m.report(&s)?;
    trace.rounds.push(record(1, RoundKind::Singletons, n, value, s.len(), n as u64));
    Ok(finish("top_k", s, value, trace, &m, start))
}

/// A uniformly random `k`-subset, evaluated in one round.
pub fn random_k<R: Rng + ?Sized>(oracle: &Oracle, k: usize, rng: &mut R) -> Result<SelectionResult> {
    check_budget(oracle, k)?;
    let start = Instant::now();
    let mut m = Metered::new(oracle);
    let n = oracle.ground_size();
    let s = sample_uniform_subset(&IndexSet::full(n), k, rng);
    let value = m.round(std::slice::from_ref(&s))?[0];
    let mut trace = RunTrace::default();
    trace.rounds.push(record(1, RoundKind::Random, n, value, k, 1));
    Ok(finish("random", s, value, trace, &m, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Modular;

    #[test]
    fn greedy_matches_top_k_on_modular() {
        let f = Oracle::new(Modular::new(vec![1.0, 4.0, 4.0, 0.5, 3.0]).unwrap());
        let g = greedy_sds_ma(&f, 3).unwrap();
        let t = top_k(&f, 3).unwrap();
        assert_eq!(g.selected, t.selected);
        assert_eq!(g.selected.as_slice(), &[1, 2, 4]);
        assert_eq!(g.trace.adaptive_rounds, 3);
        assert_eq!(t.trace.adaptive_rounds, 1);
        assert_eq!(g.value, 11.0);
    }

    #[test]
    fn budget_guard() {
        let f = Oracle::new(Modular::cardinality(3));
        assert!(matches!(top_k(&f, 4), Err(Error::Size(_))));
    }
}
