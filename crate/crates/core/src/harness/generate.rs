use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{standardize_in_place, Dataset};
use crate::solver::sample_uniform_subset;

/// Standard deviation of the Gaussian noise added to synthetic responses.
pub const NOISE_SD: f64 = 0.1;

/// Recipe for a synthetic linear-model dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Number of features.
    pub n: usize,
    /// Number of observations.
    pub d: usize,
    pub support: usize,
    /// Pairwise correlation of the features.
    pub rho: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 500 features, 100 of them in the true support, correlation 0.4.
    pub fn regression() -> Self {
        SyntheticSpec {
            n: 500,
            d: 1000,
            support: 100,
            rho: 0.4,
            noise_sd: NOISE_SD,
            seed: 0,
        }
    }

    /// 200 features, 50 of them in the true support, correlation 0.4.
    pub fn classification() -> Self {
        SyntheticSpec {
            n: 200,
            d: 500,
            support: 50,
            ..Self::regression()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("the number of features must be at least 1"));
        }
        if self.d < 2 {
            return Err(Error::config("at least 2 observations are needed to standardize"));
        }
        if self.support > self.n {
            return Err(Error::config(format!(
                "support {} exceeds the number of features {}",
                self.support, self.n
            )));
        }
        check_rho(self.rho)?;
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::config("noise sd must be finite and >= 0"));
        }
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    // One-factor equicorrelation is PSD for every n exactly when 0 <= rho < 1.
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::config(format!(
            "correlation must lie in [0, 1), got {rho}"
        )));
    }
    Ok(())
}

/// The coefficients behind a synthetic response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub support: IndexSet,
    /// Coefficients in support order.
    pub beta: Vec<f64>,
}

/// `rows × cols` draws with unit variance and pairwise correlation `rho` between columns.
fn equicorrelated<R: Rng>(rows: usize, cols: usize, rho: f64, rng: &mut R) -> DMatrix<f64> {
    let common: Vec<f64> = (0..rows).map(|_| StandardNormal.sample(rng)).collect();
    let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut x = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let z: f64 = StandardNormal.sample(rng);
            x[(i, j)] = a * common[i] + b * z;
        }
    }
    x
}

fn linear_response<R: Rng>(
    x: &DMatrix<f64>,
    spec: &SyntheticSpec,
    beta_override: Option<&[f64]>,
    rng: &mut R,
) -> Result<(DVector<f64>, GroundTruth)> {
    let support = sample_uniform_subset(&IndexSet::full(spec.n), spec.support, rng);
    let beta: Vec<f64> = match beta_override {
        Some(b) if b.len() != spec.support => {
            return Err(Error::config(format!(
                "{} coefficients given for a support of {}",
                b.len(),
                spec.support
            )))
        }
        Some(b) => b.to_vec(),
        None => {
            let u = Uniform::new(-2.0, 2.0).expect("valid range");
            (0..spec.support).map(|_| u.sample(rng)).collect()
        }
    };
    let mut y = DVector::zeros(spec.d);
    for (&j, &b) in support.iter().zip(&beta) {
        y.axpy(b, &x.column(j), 1.0);
    }
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::config(e.to_string()))?;
    for v in y.iter_mut() {
        *v += noise.sample(rng);
    }
    Ok((y, GroundTruth { support, beta }))
}

fn standardized_features<R: Rng>(spec: &SyntheticSpec, rng: &mut R) -> DMatrix<f64> {
    let mut x = equicorrelated(spec.d, spec.n, spec.rho, rng);
    for mut c in x.column_iter_mut() {
        standardize_in_place(c.as_mut_slice());
    }
    x
}

/// Regression data: standardized equicorrelated features and
/// `y = X_T β + noise` with `β ∼ U(−2, 2)` on a random support `T`.
pub fn generate_regression_with(spec: &SyntheticSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x = standardized_features(spec, &mut rng);
    let (y, truth) = linear_response(&x, spec, None, &mut rng)?;
    Ok((Dataset::new(x, y)?, truth))
}

pub fn generate_regression(n: usize, d: usize, support: usize, rho: f64, seed: u64) -> Result<Dataset> {
    let spec = SyntheticSpec {
        n,
        d,
        support,
        rho,
        noise_sd: NOISE_SD,
        seed,
    };
    Ok(generate_regression_with(&spec)?.0)
}

/// Classification data: the regression recipe with `y` set to 1 where the
/// logistic of the noisy linear predictor is at least 0.5.
pub fn generate_classification_with(
    spec: &SyntheticSpec,
    beta_override: Option<&[f64]>,
) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x = standardized_features(spec, &mut rng);
    let (z, truth) = linear_response(&x, spec, beta_override, &mut rng)?;
    let y = z.map(|v| if 1.0 / (1.0 + (-v).exp()) >= 0.5 { 1.0 } else { 0.0 });
    Ok((Dataset::new(x, y)?, truth))
}

pub fn generate_classification(n: usize, d: usize, support: usize, rho: f64, seed: u64) -> Result<Dataset> {
    let spec = SyntheticSpec {
        n,
        d,
        support,
        rho,
        noise_sd: NOISE_SD,
        seed,
    };
    Ok(generate_classification_with(&spec, None)?.0)
}

/// Design data: `n` stimuli of dimension `d` as the columns of a `d × n`
/// matrix. The `n × d` sample matrix has standardized, equicorrelated
/// columns; each stimulus is then scaled to unit norm. The response is zero.
pub fn generate_design(n: usize, d: usize, rho: f64, seed: u64) -> Result<Dataset> {
    if n < 2 || d == 0 {
        return Err(Error::config("design generation needs n >= 2 stimuli and d >= 1"));
    }
    check_rho(rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = equicorrelated(n, d, rho, &mut rng);
    for mut c in samples.column_iter_mut() {
        standardize_in_place(c.as_mut_slice());
    }
    let mut x = samples.transpose();
    for mut c in x.column_iter_mut() {
        let norm = c.norm();
        if norm > 0.0 {
            c /= norm;
        }
    }
    Dataset::new(x, DVector::zeros(d))
}
