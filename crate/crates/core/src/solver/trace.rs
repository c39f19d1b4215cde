use serde::{Deserialize, Serialize};

use super::params::DashParams;
use crate::index_set::IndexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    /// Sampling round of the adaptive-sampling loop.
    Sample,
    /// Fallback selection after a stalled outer iteration.
    Fallback,
    /// Singleton queries (greedy step, top-k, OPT grid).
    Singletons,
    /// Single evaluation of a random set.
    Random,
}

/// Telemetry for one adaptive round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based adaptive round index.
    pub round: u64,
    pub kind: RoundKind,
    /// 0-based outer iteration (0 for algorithms without outer iterations).
    pub outer: usize,
    /// Surviving pool size `|X|` when the round was issued.
    pub pool_size: usize,
    /// `f(S)` as known after the round.
    pub value: f64,
    pub selected_size: usize,
    /// Estimated `E[f_S(R)]`.
    pub estimate: Option<f64>,
    pub t: Option<f64>,
    /// `α² t / r`.
    pub set_threshold: Option<f64>,
    /// `α (1 + ε/2) t / k`.
    pub element_threshold: Option<f64>,
    pub queries: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StallReason {
    /// The filter cap was reached without passing the set threshold.
    FilterCap,
    /// A filter iteration removed nothing.
    NoShrink,
    /// The filter removed every element.
    EmptyPool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StallEvent {
    pub outer: usize,
    pub reason: StallReason,
    pub filter_iterations: usize,
}

/// A set added to the solution, with the estimate that justified it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Addition {
    pub outer: usize,
    pub added: IndexSet,
    pub estimate: f64,
    pub threshold: f64,
    pub via_fallback: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub rounds: Vec<RoundRecord>,
    pub total_queries: u64,
    pub adaptive_rounds: u64,
    pub wall_time_ms: f64,
    #[serde(default)]
    pub stalls: Vec<StallEvent>,
    #[serde(default)]
    pub additions: Vec<Addition>,
    /// Number of independent runs (guesses) merged into this trace.
    #[serde(default = "one")]
    pub runs: usize,
}

fn one() -> usize {
    1
}

impl RunTrace {
    /// `(round, f(S))` after each adaptive round, closed by the final value.
    pub fn value_series(&self, final_value: f64) -> Vec<(u64, f64)> {
        let mut s: Vec<(u64, f64)> = self.rounds.iter().map(|r| (r.round, r.value)).collect();
        match s.last_mut() {
            Some(last) if last.0 == self.adaptive_rounds => last.1 = last.1.max(final_value),
            _ => s.push((self.adaptive_rounds, final_value)),
        }
        s
    }

    pub fn stalled(&self) -> bool {
        !self.stalls.is_empty()
    }
}

/// Parameters actually used by a run, including the winning guesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub params: DashParams,
    pub opt_value: f64,
    pub alpha: f64,
    pub filter_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub algorithm: String,
    pub selected: IndexSet,
    pub value: f64,
    pub trace: RunTrace,
    pub params_echo: Option<ResolvedParams>,
}
