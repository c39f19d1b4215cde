use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{CovarianceModel, Dataset, Oracle, R2Objective, SetFunction};

/// `f(S) = min(2u(S) + 1, 2v(S))` over `U = {0..k}` and `V = {k..2k}`.
///
/// Weakly submodular with ratio 1/2 but not differentially submodular.
#[derive(Clone, Debug)]
pub struct ToyWeak {
    pub half: usize,
    /// Queries with more elements are rejected (`None` for no cap).
    pub cap: Option<usize>,
}

impl ToyWeak {
    pub fn new(half: usize) -> Self {
        ToyWeak { half, cap: None }
    }

    pub fn capped(half: usize, cap: usize) -> Self {
        ToyWeak {
            half,
            cap: Some(cap),
        }
    }

    /// Index of `u_i` (1-based `i`).
    pub fn u(&self, i: usize) -> usize {
        i - 1
    }

    /// Index of `v_i` (1-based `i`).
    pub fn v(&self, i: usize) -> usize {
        self.half + i - 1
    }

    pub fn counts(&self, set: &IndexSet) -> (usize, usize) {
        let u = set.iter().filter(|&&a| a < self.half).count();
        (u, set.len() - u)
    }
}

impl SetFunction for ToyWeak {
    fn ground_size(&self) -> usize {
        2 * self.half
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        if let Some(cap) = self.cap {
            if set.len() > cap {
                return Err(Error::Domain(format!(
                    "capped toy is defined only for sets of at most {cap} elements, got {}",
                    set.len()
                )));
            }
        }
        let (u, v) = self.counts(set);
        Ok(((2 * u + 1).min(2 * v)) as f64)
    }

    fn name(&self) -> &str {
        if self.cap.is_some() {
            "toy-capped"
        } else {
            "toy-weak"
        }
    }
}

/// Oracle for the weakly submodular toy with `|U| = |V| = k`.
pub fn make_toy_weak(k: usize) -> Oracle {
    Oracle::new(ToyWeak::new(k))
}

/// Oracle for the toy restricted to sets of at most two elements, with `|U| = |V| = 2`.
pub fn make_toy_capped() -> Oracle {
    Oracle::new(ToyWeak::capped(2, 2))
}

/// The four-dimensional R² instance: `y = e1`, `x1..x3 = e2..e4`,
/// `x4..x6 = (e1 + e_{2..4}) / √2`.
pub fn r2_counterexample_dataset() -> Dataset {
    let h = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let cols = [
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [h, h, 0.0, 0.0],
        [h, 0.0, h, 0.0],
        [h, 0.0, 0.0, h],
    ];
    let x = DMatrix::from_fn(4, 6, |i, j| cols[j][i]);
    let y = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    Dataset::new(x, y).expect("constant instance is valid")
}

/// R² oracle over the six candidates, with `C = XᵀX` and `b = Xᵀy`.
pub fn make_r2_counterexample() -> (Oracle, Dataset) {
    let data = r2_counterexample_dataset();
    let model = CovarianceModel::from_inner_products(&data, 1.0)
        .expect("unit-norm columns give a valid covariance model");
    (Oracle::new(R2Objective::new(&model)), data)
}
