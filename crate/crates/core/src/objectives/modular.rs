use super::oracle::SetFunction;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Additive set function `f(S) = Σ_{a∈S} w_a`.
#[derive(Clone, Debug)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::data("modular weights must be finite and nonnegative"));
        }
        Ok(Modular { weights })
    }

    /// Cardinality function `f(S) = |S|`.
    pub fn cardinality(n: usize) -> Self {
        Modular {
            weights: vec![1.0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        Ok(set.iter().map(|&a| self.weights[a]).sum())
    }

    fn name(&self) -> &str {
        "modular"
    }
}
