use std::time::Instant;

use rayon::prelude::*;

use super::dash::run;
use super::params::{DashParams, Guess};
use super::trace::{RoundKind, RoundRecord, SelectionResult};
use crate::error::Result;
use crate::index_set::IndexSet;
use crate::objectives::{Metered, Oracle};

/// `⌈ln(n)/ε⌉`, at least 1.
pub fn grid_length(epsilon: f64, n: usize) -> usize {
    let raw = ((n.max(1) as f64).ln() / epsilon - 1e-9).ceil();
    (raw.max(1.0)) as usize
}

/// `{(1+ε)^i · max_value : i = 1..⌈ln(n)/ε⌉}`, or `[0]` when `max_value ≤ 0`.
pub fn opt_grid_from_max(max_value: f64, epsilon: f64, n: usize) -> Vec<f64> {
    if max_value <= 0.0 {
        return vec![0.0];
    }
    (1..=grid_length(epsilon, n))
        .map(|i| (1.0 + epsilon).powi(i as i32) * max_value)
        .collect()
}

/// Evaluates every singleton in one round and returns the OPT guess grid.
pub fn opt_grid(oracle: &Oracle, epsilon: f64, n: usize) -> Result<Vec<f64>> {
    let mut m = Metered::new(oracle);
    let (grid, _) = opt_grid_metered(&mut m, epsilon, n)?;
    Ok(grid)
}

fn opt_grid_metered(m: &mut Metered<'_>, epsilon: f64, n: usize) -> Result<(Vec<f64>, f64)> {
    let singles: Vec<IndexSet> = (0..m.oracle.ground_size()).map(IndexSet::singleton).collect();
    let values = m.round(&singles)?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((opt_grid_from_max(max, epsilon, n), max))
}

/// `{1} ∪ {(1+ε)^{-i} : i = 1..⌈ln(n)/ε⌉}`, descending.
pub fn alpha_grid(epsilon: f64, n: usize) -> Vec<f64> {
    std::iter::once(1.0)
        .chain((1..=grid_length(epsilon, n)).map(|i| (1.0 + epsilon).powi(-(i as i32))))
        .collect()
}

/// Runs [`dash`](super::dash) for every `(OPT, α)` guess pair and keeps the best result.
///
/// Fixed fields of `params` collapse their grid to a single value; with both
/// fixed this is exactly one `dash` call. Runs are independent and share
/// the oracle's worker pool. The winner is the largest value, ties going to
/// the lexicographically smaller set. Its trace counts the singleton round
/// plus the longest run's rounds, and the queries of every run.
pub fn dash_with_guessing(oracle: &Oracle, params: &DashParams) -> Result<SelectionResult> {
    params.validate()?;
    let n = oracle.ground_size();
    if let (Guess::Fixed(o), Guess::Fixed(a)) = (params.opt_guess, params.alpha) {
        return run(Metered::new(oracle), params, o, a);
    }
    let start = Instant::now();
    let mut pre = Metered::new(oracle);
    let mut preamble = None;
    let opts = match params.opt_guess {
        Guess::Fixed(o) => vec![o],
        Guess::Auto => {
            let (grid, max) = opt_grid_metered(&mut pre, params.epsilon, n)?;
            preamble = Some(RoundRecord {
                round: 1,
                kind: RoundKind::Singletons,
                outer: 0,
                pool_size: n,
                value: 0.0,
                selected_size: 0,
                estimate: Some(max),
                t: None,
                set_threshold: None,
                element_threshold: None,
                queries: n as u64,
            });
            grid
        }
    };
    let alphas = match params.alpha {
        Guess::Fixed(a) => vec![a],
        Guess::Auto => alpha_grid(params.epsilon, n),
    };
    let pairs: Vec<(f64, f64)> = opts
        .iter()
        .flat_map(|&o| alphas.iter().map(move |&a| (o, a)))
        .collect();

    let one = |&(o, a): &(f64, f64)| run(Metered::new(oracle), params, o, a);
    let results: Vec<SelectionResult> = match oracle.pool() {
        Some(p) => p.install(|| pairs.par_iter().map(one).collect::<Result<Vec<_>>>())?,
        None => pairs.iter().map(one).collect::<Result<Vec<_>>>()?,
    };

    let longest = results.iter().map(|r| r.trace.adaptive_rounds).max().unwrap_or(0);
    let queries: u64 = results.iter().map(|r| r.trace.total_queries).sum();
    let runs = results.len();
    let mut best = results
        .into_iter()
        .reduce(|a, b| {
            if b.value > a.value || (b.value == a.value && b.selected < a.selected) {
                b
            } else {
                a
            }
        })
        .expect("at least one guess pair");

    let shift = pre.tally.rounds;
    for rec in &mut best.trace.rounds {
        rec.round += shift;
    }
    if let Some(rec) = preamble {
        best.trace.rounds.insert(0, rec);
    }
    best.trace.adaptive_rounds = shift + longest;
    best.trace.total_queries = pre.tally.queries + queries;
    best.trace.runs = runs;
    best.trace.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(best)
}
