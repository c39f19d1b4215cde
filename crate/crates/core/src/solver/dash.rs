use std::time::Instant;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::{DashParams, Expectation};
use super::sampling::{exact_round, sampled_round, sample_uniform_subset, Estimates};
use super::trace::{
    Addition, ResolvedParams, RoundKind, RoundRecord, RunTrace, SelectionResult, StallEvent,
    StallReason,
};
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{Metered, Oracle};

/// Adaptive sampling with the thresholds lowered by `alpha`.
///
/// Each outer iteration resets the pool to `N ∖ S`, sets
/// `t = (1 − ε)(opt_value − f(S))`, and loops: one round estimates
/// `E[f_S(R)]` and every element's `E[f_{S ∪ (R∖a)}(a)]`; if the set estimate
/// reaches `α² t / r` a fresh `R` is added, otherwise elements below
/// `α (1 + ε/2) t / k` are filtered out. A filter step that empties the pool,
/// removes nothing, or reaches the filter cap stalls the outer iteration,
/// which then adds the best of `m` candidate sets drawn from the survivors
/// (or from `N ∖ S` if none survived). Added sets are topped up to `⌈k/r⌉` elements (or the
/// remaining budget) from outside the pool when the pool has run short.
pub fn dash(
    oracle: &Oracle,
    params: &DashParams,
    opt_value: f64,
    alpha: f64,
) -> Result<SelectionResult> {
    params.validate()?;
    run(Metered::new(oracle), params, opt_value, alpha)
}

/// As [`dash`], but admits `ε = 0`.
pub(crate) fn dash_allow_zero_epsilon(
    oracle: &Oracle,
    params: &DashParams,
    opt_value: f64,
    alpha: f64,
) -> Result<SelectionResult> {
    params.validate_inner(true)?;
    run(Metered::new(oracle), params, opt_value, alpha)
}

pub(crate) fn run(
    mut metered: Metered<'_>,
    params: &DashParams,
    opt_value: f64,
    alpha: f64,
) -> Result<SelectionResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(opt_value.is_finite() && opt_value >= 0.0) {
        return Err(Error::config(format!(
            "OPT value must be finite and >= 0, got {opt_value}"
        )));
    }
    let n = metered.oracle.ground_size();
    let k = params.k;
    if k > n {
        return Err(Error::Size(format!(
            "budget k = {k} exceeds the ground set size {n}"
        )));
    }
    let start = Instant::now();
    let eps = params.epsilon;
    let r = params.r;
    let cap = params.resolved_filter_cap(n);
    let per_round = k.div_ceil(r);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace = RunTrace {
        runs: 1,
        ..Default::default()
    };

    let mut s = IndexSet::empty();
    let mut f_s: Option<f64> = None;

    'outer: for outer in 0..r {
        if s.len() >= k {
            break;
        }
        let mut pool = IndexSet::full(n).difference(&s);
        if pool.is_empty() {
            break;
        }
        if let Some(v) = f_s {
            if (1.0 - eps) * (opt_value - v) <= 0.0 {
                break;
            }
        }
        let mut filter_iterations = 0usize;
        loop {
            let size = per_round.min(k - s.len()).min(pool.len());
            let pool_size = pool.len();
            let est: Estimates = match params.expectation {
                Expectation::Sampled => sampled_round(
                    &mut metered,
                    &s,
                    f_s,
                    &pool,
                    size,
                    params.samples_m,
                    &mut rng,
                )?,
                Expectation::Exact => exact_round(&mut metered, &s, f_s, &pool, size)?,
            };
            f_s = Some(est.base);
            let t = ((1.0 - eps) * (opt_value - est.base)).max(0.0);
            let set_threshold = alpha * alpha * t / r as f64;
            let element_threshold = alpha * (1.0 + eps / 2.0) * t / k as f64;
            trace.rounds.push(RoundRecord {
                round: metered.tally.rounds,
                kind: RoundKind::Sample,
                outer,
                pool_size,
                value: est.base,
                selected_size: s.len(),
                estimate: Some(est.set),
                t: Some(t),
                set_threshold: Some(set_threshold),
                element_threshold: Some(element_threshold),
                queries: est.queries,
            });
            if t <= 0.0 {
                break 'outer;
            }
            if est.set >= set_threshold {
                let target = per_round.min(k - s.len());
                let added = padded_draw(&pool, &s, n, target, &mut rng);
                debug!(
                    "outer {outer}: adding {added} (estimate {:.6} >= {:.6})",
                    est.set, set_threshold
                );
                s = s.union(&added);
                f_s = None;
                trace.additions.push(Addition {
                    outer,
                    added,
                    estimate: est.set,
                    threshold: set_threshold,
                    via_fallback: false,
                });
                break;
            }

            filter_iterations += 1;
            let kept = IndexSet::from_sorted(
                pool.iter()
                    .zip(&est.elements)
                    .filter(|&(_, &v)| v >= element_threshold)
                    .map(|(&a, _)| a)
                    .collect(),
                n,
            )?;
            let stall = if kept.is_empty() {
                Some(StallReason::EmptyPool)
            } else if kept.len() == pool.len() {
                Some(StallReason::NoShrink)
            } else if filter_iterations >= cap {
                Some(StallReason::FilterCap)
            } else {
                None
            };
            match stall {
                None => pool = kept,
                Some(reason) => {
                    debug!("outer {outer}: stalled ({reason:?}) after {filter_iterations} filter steps");
                    trace.stalls.push(StallEvent {
                        outer,
                        reason,
                        filter_iterations,
                    });
                    let base = est.base;
                    let survivors = if kept.is_empty() { IndexSet::empty() } else { kept.clone() };
                    let (added, value, queries) = fallback(
                        &mut metered,
                        &s,
                        &survivors,
                        base,
                        per_round.min(k - s.len()),
                        params.samples_m,
                        &mut rng,
                    )?;
                    trace.rounds.push(RoundRecord {
                        round: metered.tally.rounds,
                        kind: RoundKind::Fallback,
                        outer,
                        pool_size: n - s.len(),
                        value,
                        selected_size: s.len() + added.len(),
                        estimate: Some(value - base),
                        t: Some(t),
                        set_threshold: Some(set_threshold),
                        element_threshold: Some(element_threshold),
                        queries,
                    });
                    trace.additions.push(Addition {
                        outer,
                        added: added.clone(),
                        estimate: value - base,
                        threshold: set_threshold,
                        via_fallback: true,
                    });
                    s = s.union(&added);
                    f_s = Some(value);
                    break;
                }
            }
        }
    }

    let value = match f_s {
        Some(v) => v,
        None => metered.report(&s)?,
    };
    trace.total_queries = metered.tally.queries;
    trace.adaptive_rounds = metered.tally.rounds;
    trace.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(SelectionResult {
        algorithm: "dash".to_string(),
        selected: s,
        value,
        trace,
        params_echo: Some(ResolvedParams {
            params: params.clone(),
            opt_value,
            alpha,
            filter_cap: cap,
        }),
    })
}

/// A uniform draw of up to `size` elements from `pool`, topped up from
/// the rest of `N ∖ S` when the pool is smaller than `size`.
fn padded_draw(pool: &IndexSet, s: &IndexSet, n: usize, size: usize, rng: &mut ChaCha8Rng) -> IndexSet {
    let inner = sample_uniform_subset(pool, size.min(pool.len()), rng);
    if inner.len() >= size {
        return inner;
    }
    let outside = IndexSet::full(n).difference(s).difference(pool);
    let extra = sample_uniform_subset(&outside, (size - inner.len()).min(outside.len()), rng);
    inner.union(&extra)
}

/// Best of `m` padded draws from the surviving pool by `f(S ∪ R)`, falling
/// back to draws from `N ∖ S` when no survivors remain. Adds nothing if every
/// candidate lowers `f`.
fn fallback(
    metered: &mut Metered<'_>,
    s: &IndexSet,
    survivors: &IndexSet,
    f_s: f64,
    size: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(IndexSet, f64, u64)> {
    let n = metered.oracle.ground_size();
    let candidates: Vec<IndexSet> = (0..m).map(|_| padded_draw(survivors, s, n, size, rng)).collect();
    let sets: Vec<IndexSet> = candidates.iter().map(|r| s.union(r)).collect();
    let values = metered.round(&sets)?;
    let mut best = 0;
    for i in 1..candidates.len() {
        let better = values[i] > values[best]
            || (values[i] == values[best] && candidates[i] < candidates[best]);
        if better {
            best = i;
        }
    }
    let value = if values[best] < f_s { f_s } else { values[best] };
    let added = if values[best] < f_s {
        IndexSet::empty()
    } else {
        candidates[best].clone()
    };
    Ok((added, value, sets.len() as u64))
}
