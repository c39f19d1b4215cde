//! Variance-reduction objective for least-squares feature selection.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::data::Dataset;
use super::oracle::SetFunction;
use crate::error::Result;
use crate::index_set::IndexSet;
use crate::linalg;

/// Coefficients of a fit restricted to a support set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// Length-`n` coefficient vector, exactly zero off the support.
    pub coefficients: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn restricted_gram(x: &DMatrix<f64>, y: &DVector<f64>, s: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let xs = x.select_columns(s);
    (xs.transpose() * &xs, xs.transpose() * y)
}

/// Least-squares fit of `y` on the columns in `s`, without intercept.
///
/// `objective_value` is `‖y‖² − ‖y − X_S w‖²`.
pub fn fit_least_squares(data: &Dataset, s: &IndexSet) -> Result<FitResult> {
    let n = data.cols();
    let mut coefficients = vec![0.0; n];
    if s.is_empty() {
        return Ok(FitResult {
            coefficients,
            objective_value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let (g, b) = restricted_gram(data.features(), data.response(), s.as_slice());
    let w = linalg::solve_spd(&g, &b)?;
    for (k, &j) in s.iter().enumerate() {
        coefficients[j] = w[k];
    }
    let objective_value = linalg::inverse_quadratic_form(&g, &b)?;
    Ok(FitResult {
        coefficients,
        objective_value,
        iterations: 1,
        converged: true,
    })
}

/// `‖y‖² − min_w ‖y − X_S w‖²`.
pub fn eval_reg(data: &Dataset, s: &IndexSet) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let (g, b) = restricted_gram(data.features(), data.response(), s.as_slice());
    linalg::inverse_quadratic_form(&g, &b)
}

/// Regression objective with the full Gram matrix cached, so a query costs
/// one `|S|×|S|` Cholesky factorization.
pub struct RegressionObjective {
    gram: DMatrix<f64>,
    xty: DVector<f64>,
}

impl RegressionObjective {
    pub fn new(data: &Dataset) -> Self {
        let x = data.features();
        RegressionObjective {
            gram: x.transpose() * x,
            xty: x.transpose() * data.response(),
        }
    }
}

impl SetFunction for RegressionObjective {
    fn ground_size(&self) -> usize {
        self.xty.len()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let g = linalg::principal_submatrix(&self.gram, set.as_slice());
        let b = linalg::subvector(&self.xty, set.as_slice());
        linalg::inverse_quadratic_form(&g, &b)
    }

    fn name(&self) -> &str {
        "reg"
    }
}
