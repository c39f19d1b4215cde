use log::warn;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::linalg::{principal_submatrix, symmetric_eigenvalues};
use crate::objectives::{Dataset, RegressionObjective, SetFunction};
use crate::solver::sample_uniform_subset;

/// Negative eigenvalues down to `-PSD_RTOL · λ_max` are rounding noise.
pub const PSD_RTOL: f64 = 1e-8;
/// Relative tolerance of the sandwich inequalities.
pub const SANDWICH_RTOL: f64 = 1e-8;

/// Eigenvalue certificate for the regression objectives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Restricted strong concavity surrogate (`λ_min` for least squares).
    pub m: f64,
    /// Restricted smoothness surrogate (`λ_max` for least squares).
    #[serde(rename = "M")]
    pub big_m: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl SpectralBounds {
    fn from_eigenvalues(lo: f64, hi: f64) -> Result<Self> {
        if lo < -PSD_RTOL * hi.abs().max(1.0) {
            return Err(Error::Numeric(format!(
                "covariance is not positive semidefinite (smallest eigenvalue {lo:e})"
            )));
        }
        let lo = lo.max(0.0);
        let gamma = if hi > 0.0 { (lo / hi).min(1.0) } else { 0.0 };
        Ok(SpectralBounds {
            lambda_min: lo,
            lambda_max: hi,
            m: lo,
            big_m: hi,
            gamma,
            alpha: gamma * gamma,
        })
    }
}

/// Eigenvalue extremes of a symmetric covariance matrix.
pub fn spectral_gamma_from_covariance(c: &DMatrix<f64>) -> Result<SpectralBounds> {
    if c.nrows() != c.ncols() || c.nrows() == 0 {
        return Err(Error::data("covariance must be a nonempty square matrix"));
    }
    let ev = symmetric_eigenvalues(c);
    SpectralBounds::from_eigenvalues(ev[0], ev[ev.len() - 1])
}

/// Certified `γ = λ_min / λ_max` of the full feature covariance `XᵀX / d`.
///
/// Every principal submatrix has eigenvalues inside `[λ_min, λ_max]`, so the
/// ratio bounds the restricted one for all support sizes.
pub fn spectral_gamma(data: &Dataset) -> Result<SpectralBounds> {
    if !data.is_standardized(1e-6) {
        warn!("features are not standardized; spectral bounds describe the data as given");
    }
    spectral_gamma_from_covariance(&data.feature_covariance())
}

/// Uncertified refinement from sampled `size`-column principal submatrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSpectrum {
    pub subset_size: usize,
    pub samples: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub gamma: f64,
}

pub fn sampled_spectrum<R: Rng + ?Sized>(
    data: &Dataset,
    size: usize,
    samples: usize,
    rng: &mut R,
) -> Result<SampledSpectrum> {
    let c = data.feature_covariance();
    let n = c.nrows();
    let size = size.clamp(1, n);
    let full = IndexSet::full(n);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples.max(1) {
        let idx = sample_uniform_subset(&full, size, rng);
        let ev = symmetric_eigenvalues(&principal_submatrix(&c, idx.as_slice()));
        lo = lo.min(ev[0]);
        hi = hi.max(ev[ev.len() - 1]);
    }
    let b = SpectralBounds::from_eigenvalues(lo, hi)?;
    Ok(SampledSpectrum {
        subset_size: size,
        samples: samples.max(1),
        lambda_min: b.lambda_min,
        lambda_max: b.lambda_max,
        gamma: b.gamma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub trials: usize,
    pub violations: usize,
    pub gamma: f64,
    pub tolerance: f64,
    /// Largest `f_S(A) / Σ f_S(a)` seen.
    pub max_ratio: f64,
    /// Smallest `f_S(A) / Σ f_S(a)` seen.
    pub min_ratio: f64,
}

/// Checks `γ Σ f_S(a) ≤ f_S(A) ≤ Σ f_S(a) / γ` for the regression objective.
///
/// `S` has between 0 and `n/2` elements and `A` is a nonempty disjoint set,
/// both uniform. Each side may exceed its bound by `SANDWICH_RTOL · max(1, f(S ∪ A))`.
pub fn sandwich_check<R: Rng + ?Sized>(
    data: &Dataset,
    n_trials: usize,
    rng: &mut R,
) -> Result<SandwichReport> {
    let bounds = spectral_gamma(data)?;
    let gamma = bounds.gamma;
    let f = RegressionObjective::new(data);
    let n = data.cols();
    let full = IndexSet::full(n);
    let mut violations = 0;
    let (mut max_ratio, mut min_ratio) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..n_trials {
        let s_len = rng.random_range(0..=(n / 2).min(n - 1));
        let s = sample_uniform_subset(&full, s_len, rng);
        let rest = full.difference(&s);
        let a_len = rng.random_range(1..=rest.len());
        let a = sample_uniform_subset(&rest, a_len, rng);
        let fs = f.eval(&s)?;
        let fu = f.eval(&s.union(&a))?;
        let mut sum = 0.0;
        for &x in a.iter() {
            sum += f.eval(&s.with(x))? - fs;
        }
        let joint = fu - fs;
        let tol = SANDWICH_RTOL * fu.abs().max(1.0);
        let lower_ok = gamma * sum <= joint + tol;
        let upper_ok = gamma <= 0.0 || joint * gamma <= sum + tol * gamma;
        if !(lower_ok && upper_ok) {
            violations += 1;
        }
        if sum.abs() > tol {
            max_ratio = max_ratio.max(joint / sum);
            min_ratio = min_ratio.min(joint / sum);
        }
    }
    Ok(SandwichReport {
        trials: n_trials,
        violations,
        gamma,
        tolerance: SANDWICH_RTOL,
        max_ratio,
        min_ratio,
    })
}
