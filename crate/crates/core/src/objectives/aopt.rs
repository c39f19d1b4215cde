//! Bayesian A-optimal experimental design.
//!
//! Columns of the feature matrix are candidate stimuli `x_i ∈ R^d`. With prior
//! precision `β²I` and noise variance `σ²`, selecting `S` reduces the trace of
//! the posterior covariance by
//!
//! ```text
//! f(S) = Tr(β⁻²I) − Tr((β²I + σ⁻² X_S X_Sᵀ)⁻¹)
//! ```
//!
//! Two evaluation routes are provided. The direct route factorizes the `d×d`
//! posterior precision. The Woodbury route works in the `|S|×|S|` space:
//!
//! ```text
//! f(S) = β⁻⁴ Tr((σ²I + β⁻² G_S)⁻¹ G_S),   G_S = X_Sᵀ X_S
//! ```
//!
//! and is used whenever `|S| < d`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::data::Dataset;
use super::oracle::SetFunction;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AOptParams {
    /// Prior scale; the prior precision is `beta² I`.
    pub beta: f64,
    /// Noise standard deviation.
    pub sigma: f64,
}

impl Default for AOptParams {
    fn default() -> Self {
        AOptParams {
            beta: 1.0,
            sigma: 1.0,
        }
    }
}

impl AOptParams {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        let p = AOptParams { beta, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite() && self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config(format!(
                "A-optimality needs beta > 0 and sigma > 0 (got beta={}, sigma={})",
                self.beta, self.sigma
            )));
        }
        Ok(())
    }

    /// Value of a single stimulus of unit norm: `σ⁻² / (β²(β² + σ⁻²))`.
    pub fn unit_stimulus_value(&self) -> f64 {
        let b2 = self.beta * self.beta;
        let prec = 1.0 / (self.sigma * self.sigma);
        prec / (b2 * (b2 + prec))
    }

    /// Lower bound `σ⁻²(β² + σ⁻²‖X‖²)⁻²` on the gain per added unit-norm stimulus.
    pub fn per_element_lower_bound(&self, spectral_norm: f64) -> f64 {
        let b2 = self.beta * self.beta;
        let prec = 1.0 / (self.sigma * self.sigma);
        let denom = b2 + prec * spectral_norm * spectral_norm;
        prec / (denom * denom)
    }
}

/// Direct route: factorizes the `d×d` posterior precision.
pub fn eval_aopt_direct(x: &DMatrix<f64>, s: &IndexSet, p: &AOptParams) -> Result<f64> {
    p.validate()?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let d = x.nrows();
    let b2 = p.beta * p.beta;
    let xs = x.select_columns(s.as_slice());
    let mut precision = &xs * xs.transpose() / (p.sigma * p.sigma);
    for i in 0..d {
        precision[(i, i)] += b2;
    }
    let posterior_trace = linalg::trace_of_inverse(&precision)?;
    Ok(d as f64 / b2 - posterior_trace)
}

fn eval_woodbury(gram_s: &DMatrix<f64>, p: &AOptParams) -> Result<f64> {
    let m = gram_s.nrows();
    let b2 = p.beta * p.beta;
    let mut a = gram_s / b2;
    for i in 0..m {
        a[(i, i)] += p.sigma * p.sigma;
    }
    let f = linalg::factor_spd(&a)?;
    let sol = f.chol.solve(gram_s);
    Ok(sol.trace() / (b2 * b2))
}

/// A-optimality gain of the stimuli in `s`.
pub fn eval_aopt(data: &Dataset, s: &IndexSet, p: &AOptParams) -> Result<f64> {
    p.validate()?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let x = data.features();
    if s.len() < x.nrows() {
        let xs = x.select_columns(s.as_slice());
        eval_woodbury(&(xs.transpose() * xs), p)
    } else {
        eval_aopt_direct(x, s, p)
    }
}

pub struct AOptObjective {
    x: DMatrix<f64>,
    gram: DMatrix<f64>,
    params: AOptParams,
}

impl AOptObjective {
    pub fn new(data: &Dataset, params: AOptParams) -> Result<Self> {
        params.validate()?;
        let x = data.features().clone();
        let gram = x.transpose() * &x;
        Ok(AOptObjective { x, gram, params })
    }

    pub fn params(&self) -> &AOptParams {
        &self.params
    }

    /// Column norms of the stimulus matrix.
    pub fn stimulus_norms(&self) -> DVector<f64> {
        DVector::from_iterator(self.x.ncols(), self.x.column_iter().map(|c| c.norm()))
    }
}

impl SetFunction for AOptObjective {
    fn ground_size(&self) -> usize {
        self.x.ncols()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        if set.len() < self.x.nrows() {
            eval_woodbury(&linalg::principal_submatrix(&self.gram, set.as_slice()), &self.params)
        } else {
            eval_aopt_direct(&self.x, set, &self.params)
        }
    }

    fn name(&self) -> &str {
        "aopt"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree() {
        let x = DMatrix::from_row_slice(
            3,
            4,
            &[0.3, -1.0, 0.2, 0.9, 1.1, 0.4, -0.7, 0.1, -0.2, 0.5, 0.8, -1.3],
        );
        let data = Dataset::new(x.clone(), DVector::zeros(3)).unwrap();
        let p = AOptParams::new(0.7, 1.3).unwrap();
        for s in [vec![0], vec![1, 3], vec![0, 2, 3], vec![0, 1, 2, 3]] {
            let s = IndexSet::from_unsorted(s);
            let direct = eval_aopt_direct(&x, &s, &p).unwrap();
            let cached = AOptObjective::new(&data, p).unwrap().eval(&s).unwrap();
            let fresh = eval_aopt(&data, &s, &p).unwrap();
            assert!((direct - cached).abs() < 1e-12, "{s}: {direct} vs {cached}");
            assert!((direct - fresh).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_params() {
        assert!(AOptParams::new(0.0, 1.0).is_err());
        assert!(AOptParams::new(1.0, -1.0).is_err());
    }
}
