use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// A monotone set function over the ground set `{0, .., n-1}`.
///
/// Implementations must be pure: the same set always yields the same value.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn eval(&self, set: &IndexSet) -> Result<f64>;

    fn name(&self) -> &str {
        "set-function"
    }
}

/// Query and adaptive-round counts for one run of an algorithm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub queries: u64,
    pub rounds: u64,
}

/// Set-function oracle with query and adaptive-round accounting.
///
/// A call to [`Oracle::eval_batch`] is one adaptive round: every set in the
/// batch is fixed before any value in it is known. The batch may be spread
/// over a worker pool; results always come back in input order.
pub struct Oracle {
    func: Arc<dyn SetFunction>,
    queries: AtomicU64,
    rounds: AtomicU64,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Oracle {
    pub fn new<F: SetFunction + 'static>(func: F) -> Self {
        Self::from_arc(Arc::new(func))
    }

    pub fn from_arc(func: Arc<dyn SetFunction>) -> Self {
        Oracle {
            func,
            queries: AtomicU64::new(0),
            rounds: AtomicU64::new(0),
            pool: None,
        }
    }

    /// A new oracle over the same function with fresh counters.
    pub fn share(&self) -> Oracle {
        Oracle {
            func: Arc::clone(&self.func),
            queries: AtomicU64::new(0),
            rounds: AtomicU64::new(0),
            pool: self.pool.clone(),
        }
    }

    /// Dispatches batches over `workers` threads (1 means evaluate inline).
    pub fn with_workers(mut self, workers: usize) -> Result<Self> {
        self.pool = build_pool(workers)?;
        Ok(self)
    }

    pub fn workers(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub(crate) fn pool(&self) -> Option<&rayon::ThreadPool> {
        self.pool.as_deref()
    }

    pub fn ground_size(&self) -> usize {
        self.func.ground_size()
    }

    pub fn name(&self) -> &str {
        self.func.name()
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.func
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn rounds(&self) -> u64 {
        self.rounds.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.rounds.store(0, Ordering::Relaxed);
    }

    fn check(&self, set: &IndexSet) -> Result<()> {
        let n = self.ground_size();
        match set.max_index() {
            Some(m) if m >= n => Err(Error::data(format!(
                "index {m} out of range for ground set of size {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Evaluates a single set as its own adaptive round.
    pub fn eval(&self, set: &IndexSet) -> Result<f64> {
        let v = self.eval_batch(std::slice::from_ref(set))?;
        Ok(v[0])
    }

    /// Evaluates a set for reporting purposes: counted as a query, not a round.
    pub fn eval_report(&self, set: &IndexSet) -> Result<f64> {
        self.check(set)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.func.eval(set)
    }

    /// Evaluates all sets as one adaptive round on the oracle's own pool.
    pub fn eval_batch(&self, sets: &[IndexSet]) -> Result<Vec<f64>> {
        self.eval_batch_on(self.pool.as_deref(), sets)
    }

    /// Evaluates all sets as one adaptive round on the given pool.
    pub fn eval_batch_on(
        &self,
        pool: Option<&rayon::ThreadPool>,
        sets: &[IndexSet],
    ) -> Result<Vec<f64>> {
        for s in sets {
            self.check(s)?;
        }
        self.rounds.fetch_add(1, Ordering::Relaxed);
        self.queries.fetch_add(sets.len() as u64, Ordering::Relaxed);
        let f = &self.func;
        let results: Vec<Result<f64>> = match pool {
            Some(p) if sets.len() > 1 => {
                p.install(|| sets.par_iter().map(|s| f.eval(s)).collect())
            }
            _ => sets.iter().map(|s| f.eval(s)).collect(),
        };
        results.into_iter().collect()
    }

    /// `f(S ∪ A) − f(S)`; elements of `A` already in `S` are ignored.
    pub fn marginal(&self, s: &IndexSet, a: &IndexSet) -> Result<f64> {
        let a = a.difference(s);
        if a.is_empty() {
            return Ok(0.0);
        }
        let v = self.eval_batch(&[s.union(&a), s.clone()])?;
        Ok(v[0] - v[1])
    }
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("function", &self.func.name())
            .field("ground_size", &self.ground_size())
            .field("queries", &self.queries())
            .field("rounds", &self.rounds())
            .field("workers", &self.workers())
            .finish()
    }
}

pub(crate) fn build_pool(workers: usize) -> Result<Option<Arc<rayon::ThreadPool>>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(|p| Some(Arc::new(p)))
        .map_err(|e| Error::config(format!("cannot start {workers} workers: {e}")))
}

/// Counts the work one algorithm run sends through an [`Oracle`].
pub(crate) struct Metered<'a> {
    pub oracle: &'a Oracle,
    pub pool: Option<&'a rayon::ThreadPool>,
    pub tally: Tally,
}

impl<'a> Metered<'a> {
    pub fn new(oracle: &'a Oracle) -> Self {
        Metered {
            oracle,
            pool: oracle.pool.as_deref(),
            tally: Tally::default(),
        }
    }

    pub fn on_pool(oracle: &'a Oracle, pool: Option<&'a rayon::ThreadPool>) -> Self {
        Metered {
            oracle,
            pool,
            tally: Tally::default(),
        }
    }

    pub fn round(&mut self, sets: &[IndexSet]) -> Result<Vec<f64>> {
        let v = self.oracle.eval_batch_on(self.pool, sets)?;
        self.tally.rounds += 1;
        self.tally.queries += sets.len() as u64;
        Ok(v)
    }

    pub fn report(&mut self, set: &IndexSet) -> Result<f64> {
        self.tally.queries += 1;
        self.oracle.eval_report(set)
    }
}
