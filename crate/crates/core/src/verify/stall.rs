use serde::{Deserialize, Serialize};

use super::brute::brute_force_opt;
use crate::error::Result;
use crate::index_set::IndexSet;
use crate::objectives::Oracle;
use crate::solver::{dash_allow_zero_epsilon, DashParams, Expectation, StallReason};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StallReport {
    /// Some outer iteration failed to pass the set threshold within the filter loop.
    pub stall: bool,
    pub reasons: Vec<StallReason>,
    pub filter_cap: usize,
    pub alpha: f64,
    pub opt_value: f64,
    pub selected: IndexSet,
    pub value: f64,
    pub adaptive_rounds: u64,
}

/// One outer iteration, `ε = 0`, exact expectations.
pub fn stall_params(k: usize) -> DashParams {
    DashParams::new(k, 1, 0.0).with_expectation(Expectation::Exact)
}

/// Runs the selector with `ε` allowed to be 0 and reports whether it stalled.
///
/// `alpha` defaults to 1 (plain adaptive sampling) and OPT to the brute-force
/// optimum when `params` leaves them on auto.
pub fn demonstrate_stall(oracle: &Oracle, k: usize, params: &DashParams) -> Result<StallReport> {
    let mut p = params.clone();
    p.k = k;
    let alpha = p.alpha.fixed().unwrap_or(1.0);
    let opt_value = match p.opt_guess.fixed() {
        Some(o) => o,
        None => brute_force_opt(oracle, k)?.1,
    };
    let res = dash_allow_zero_epsilon(oracle, &p, opt_value, alpha)?;
    Ok(StallReport {
        stall: res.trace.stalled(),
        reasons: res.trace.stalls.iter().map(|s| s.reason).collect(),
        filter_cap: p.resolved_filter_cap(oracle.ground_size()),
        alpha,
        opt_value,
        selected: res.selected,
        value: res.value,
        adaptive_rounds: res.trace.adaptive_rounds,
    })
}
