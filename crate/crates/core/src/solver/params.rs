use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A parameter that is either supplied or searched over a guess grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Guess {
    Auto,
    Fixed(f64),
}

impl Guess {
    pub fn fixed(&self) -> Option<f64> {
        match self {
            Guess::Fixed(v) => Some(*v),
            Guess::Auto => None,
        }
    }
}

impl std::str::FromStr for Guess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Guess::Auto);
        }
        s.parse::<f64>()
            .map(Guess::Fixed)
            .map_err(|_| Error::config(format!("expected a number or \"auto\", got '{s}'")))
    }
}

/// How the expectations over `R ∼ U(X)` are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    /// Average over `samples_m` independent draws.
    #[default]
    Sampled,
    /// Enumerate every subset of the required size (small pools only).
    Exact,
}

/// Knobs of the adaptive-sampling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DashParams {
    /// Cardinality budget.
    pub k: usize,
    /// Number of outer iterations.
    pub r: usize,
    pub epsilon: f64,
    pub alpha: Guess,
    /// Draws per expectation estimate.
    pub samples_m: usize,
    pub opt_guess: Guess,
    /// Maximum filter iterations per outer iteration; `None` uses
    /// `⌈log_{1+ε/2} n⌉ + 2`.
    pub filter_cap: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub expectation: Expectation,
}

impl Default for DashParams {
    fn default() -> Self {
        DashParams {
            k: 10,
            r: 5,
            epsilon: 0.1,
            alpha: Guess::Auto,
            samples_m: 5,
            opt_guess: Guess::Auto,
            filter_cap: None,
            seed: 0,
            expectation: Expectation::Sampled,
        }
    }
}

impl DashParams {
    pub fn new(k: usize, r: usize, epsilon: f64) -> Self {
        DashParams {
            k,
            r,
            epsilon,
            ..Default::default()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Guess::Fixed(alpha);
        self
    }

    pub fn with_opt(mut self, opt: f64) -> Self {
        self.opt_guess = Guess::Fixed(opt);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, m: usize) -> Self {
        self.samples_m = m;
        self
    }

    pub fn with_filter_cap(mut self, cap: usize) -> Self {
        self.filter_cap = Some(cap);
        self
    }

    pub fn with_expectation(mut self, e: Expectation) -> Self {
        self.expectation = e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inner(false)
    }

    /// `allow_zero_epsilon` admits `ε = 0`, which only the stall demonstrations use.
    pub(crate) fn validate_inner(&self, allow_zero_epsilon: bool) -> Result<()> {
        if self.r == 0 {
            return Err(Error::config("r must be at least 1"));
        }
        let eps_ok = if allow_zero_epsilon {
            (0.0..1.0).contains(&self.epsilon)
        } else {
            self.epsilon > 0.0 && self.epsilon < 1.0
        };
        if !eps_ok {
            return Err(Error::config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if let Guess::Fixed(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::config(format!("alpha must lie in (0, 1], got {a}")));
            }
        }
        if let Guess::Fixed(o) = self.opt_guess {
            if !(o.is_finite() && o >= 0.0) {
                return Err(Error::config(format!("OPT guess must be finite and >= 0, got {o}")));
            }
        }
        if self.samples_m == 0 {
            return Err(Error::config("samples must be at least 1"));
        }
        if self.filter_cap == Some(0) {
            return Err(Error::config("filter cap must be at least 1"));
        }
        Ok(())
    }

    /// The filter cap in force for a ground set of size `n`.
    pub fn resolved_filter_cap(&self, n: usize) -> usize {
        if let Some(c) = self.filter_cap {
            return c;
        }
        default_filter_cap(self.epsilon, n)
    }
}

/// `⌈log_{1+ε/2} n⌉ + 2` (or `n + 2` when `ε = 0`).
pub fn default_filter_cap(epsilon: f64, n: usize) -> usize {
    if epsilon <= 0.0 {
        return n + 2;
    }
    let n = n.max(1) as f64;
    let levels = (n.ln() / (1.0 + epsilon / 2.0).ln() - 1e-9).ceil().max(0.0);
    levels as usize + 2
}
