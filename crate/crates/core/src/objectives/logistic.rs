//! Bernoulli log-likelihood objective, fit by damped Newton (IRLS).

use nalgebra::{DMatrix, DVector};

use super::data::Dataset;
use super::oracle::SetFunction;
use super::regression::FitResult;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::linalg;

pub const LOGISTIC_RIDGE: f64 = 1e-8;
pub const LOGISTIC_TOL: f64 = 1e-8;
pub const LOGISTIC_MAX_ITER: usize = 100;

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `Σ y_i z_i − ln(1 + e^{z_i})` for linear predictor `z`.
pub fn log_likelihood(y: &DVector<f64>, z: &DVector<f64>) -> f64 {
    y.iter().zip(z.iter()).map(|(&yi, &zi)| yi * zi - softplus(zi)).sum()
}

struct Fit {
    w: DVector<f64>,
    loglik: f64,
    penalized: f64,
    iterations: usize,
    converged: bool,
}

fn newton(xs: &DMatrix<f64>, y: &DVector<f64>, tol: f64) -> Result<Fit> {
    let p = xs.ncols();
    let lam = LOGISTIC_RIDGE;
    let penalized = |w: &DVector<f64>| {
        let z = xs * w;
        let ll = log_likelihood(y, &z);
        (ll, ll - 0.5 * lam * w.norm_squared())
    };
    let mut w = DVector::zeros(p);
    let (mut ll, mut obj) = penalized(&w);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < LOGISTIC_MAX_ITER {
        let z = xs * &w;
        let prob = z.map(sigmoid);
        let grad = xs.transpose() * (y - &prob) - &w * lam;
        if grad.norm() < tol {
            converged = true;
            break;
        }
        let weights = prob.map(|q| q * (1.0 - q));
        let mut xw = xs.clone();
        for mut col in xw.column_iter_mut() {
            col.component_mul_assign(&weights);
        }
        let mut hess = xs.transpose() * xw;
        for i in 0..p {
            hess[(i, i)] += lam;
        }
        let step = linalg::solve_spd(&hess, &grad)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &w + &step * t;
            let (cll, cobj) = penalized(&cand);
            if cobj.is_finite() && cobj >= obj - 1e-14 * obj.abs() {
                w = cand;
                ll = cll;
                obj = cobj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    if !ll.is_finite() {
        return Err(Error::Numeric("logistic fit produced a non-finite likelihood".into()));
    }
    Ok(Fit {
        w,
        loglik: ll,
        penalized: obj,
        iterations,
        converged,
    })
}

/// Maximizes the Bernoulli log-likelihood over coefficients supported on `s`
/// (no intercept, ridge `1e-8`). `objective_value` is the unpenalized log-likelihood.
pub fn fit_logistic(data: &Dataset, s: &IndexSet, tol: f64) -> Result<FitResult> {
    data.require_binary_response()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::config("logistic tolerance must be positive"));
    }
    let n = data.cols();
    let y = data.response();
    let mut coefficients = vec![0.0; n];
    if s.is_empty() {
        let z = DVector::zeros(data.rows());
        return Ok(FitResult {
            coefficients,
            objective_value: log_likelihood(y, &z),
            iterations: 0,
            converged: true,
        });
    }
    let xs = data.features().select_columns(s.as_slice());
    let fit = newton(&xs, y, tol)?;
    for (k, &j) in s.iter().enumerate() {
        coefficients[j] = fit.w[k];
    }
    Ok(FitResult {
        coefficients,
        objective_value: fit.loglik,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

/// Log-likelihood gain of the best fit on `s` over the all-zero model.
///
/// The gain uses the ridge-penalized optimum, which keeps it monotone in `s`
/// even when a small support separates the classes.
pub fn eval_class(data: &Dataset, s: &IndexSet) -> Result<f64> {
    data.require_binary_response()?;
    LogisticObjective::new(data)?.eval(s)
}

pub struct LogisticObjective {
    x: DMatrix<f64>,
    y: DVector<f64>,
    null_loglik: f64,
    tol: f64,
}

impl LogisticObjective {
    pub fn new(data: &Dataset) -> Result<Self> {
        data.require_binary_response()?;
        let y = data.response().clone();
        let null_loglik = log_likelihood(&y, &DVector::zeros(y.len()));
        Ok(LogisticObjective {
            x: data.features().clone(),
            y,
            null_loglik,
            tol: LOGISTIC_TOL,
        })
    }
}

impl SetFunction for LogisticObjective {
    fn ground_size(&self) -> usize {
        self.x.ncols()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let xs = self.x.select_columns(set.as_slice());
        let fit = newton(&xs, &self.y, self.tol)?;
        Ok((fit.penalized - self.null_loglik).max(0.0))
    }

    fn name(&self) -> &str {
        "class"
    }
}
