use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Feature matrix (`d` observations by `n` candidate elements) plus a response.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    response: DVector<f64>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, response: DVector<f64>) -> Result<Self> {
        Self::with_names(features, response, None)
    }

    pub fn with_names(
        features: DMatrix<f64>,
        response: DVector<f64>,
        column_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (d, n) = features.shape();
        if d == 0 || n == 0 {
            return Err(Error::data(format!(
                "dataset must have at least one row and one column (got {d}x{n})"
            )));
        }
        if response.len() != d {
            return Err(Error::data(format!(
                "response length {} does not match {} feature rows",
                response.len(),
                d
            )));
        }
        if let Some((pos, _)) = features.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            return Err(Error::data(format!(
                "non-finite feature at row {}, column {}",
                pos % d + 1,
                pos / d + 1
            )));
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("non-finite response at row {}", i + 1)));
        }
        if let Some(names) = &column_names {
            if names.len() != n {
                return Err(Error::data(format!(
                    "{} column names for {} columns",
                    names.len(),
                    n
                )));
            }
        }
        Ok(Dataset {
            features,
            response,
            column_names,
        })
    }

    /// Builds a dataset from row-major feature data.
    pub fn from_rows(rows: usize, cols: usize, data: &[f64], response: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::data(format!(
                "expected {} feature values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::new(
            DMatrix::from_row_slice(rows, cols, data),
            DVector::from_column_slice(response),
        )
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Number of observations.
    pub fn rows(&self) -> usize {
        self.features.nrows()
    }

    /// Number of candidate elements.
    pub fn cols(&self) -> usize {
        self.features.ncols()
    }

    /// Errors unless every response is exactly 0 or 1.
    pub fn require_binary_response(&self) -> Result<()> {
        match self.response.iter().position(|&v| v != 0.0 && v != 1.0) {
            Some(i) => Err(Error::data(format!(
                "classification requires a 0/1 response; row {} holds {}",
                i + 1,
                self.response[i]
            ))),
            None => Ok(()),
        }
    }

    /// `XᵀX / d`, the feature covariance for standardized columns.
    pub fn feature_covariance(&self) -> DMatrix<f64> {
        self.features.transpose() * &self.features / self.rows() as f64
    }

    /// True when every column has mean 0 and (population) variance 1 within `tol`.
    pub fn is_standardized(&self, tol: f64) -> bool {
        let d = self.rows() as f64;
        self.features.column_iter().all(|c| {
            let mean = c.sum() / d;
            let var = c.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / d;
            mean.abs() <= tol && (var - 1.0).abs() <= tol
        })
    }

    /// Returns a copy whose columns (and response, when `response` is set) are
    /// centered and scaled to unit population variance. Constant columns are
    /// centered only.
    pub fn standardized(&self, response: bool) -> Dataset {
        let mut x = self.features.clone();
        for mut c in x.column_iter_mut() {
            standardize_in_place(c.as_mut_slice());
        }
        let mut y = self.response.clone();
        if response {
            standardize_in_place(y.as_mut_slice());
        }
        Dataset {
            features: x,
            response: y,
            column_names: self.column_names.clone(),
        }
    }
}

pub(crate) fn standardize_in_place(v: &mut [f64]) {
    let d = v.len() as f64;
    let mean = v.iter().sum::<f64>() / d;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / d;
    let sd = var.sqrt();
    for x in v.iter_mut() {
        *x -= mean;
        if sd > 0.0 {
            *x /= sd;
        }
    }
}

/// Predictor covariance `C` and response covariances `b` for the R² objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl CovarianceModel {
    pub fn new(b: Vec<f64>, c: Vec<Vec<f64>>) -> Result<Self> {
        let m = CovarianceModel { b, c };
        m.validate()?;
        Ok(m)
    }

    /// Population covariances of a dataset after standardizing predictors and response.
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        let std = data.standardized(true);
        Self::from_inner_products(&std, std.rows() as f64)
    }

    /// `C = XᵀX / scale`, `b = Xᵀy / scale` with no centering.
    pub fn from_inner_products(data: &Dataset, scale: f64) -> Result<Self> {
        let x = data.features();
        let g = x.transpose() * x / scale;
        let b = x.transpose() * data.response() / scale;
        let n = g.nrows();
        Self::new(
            b.iter().copied().collect(),
            (0..n).map(|i| g.row(i).iter().copied().collect()).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: CovarianceModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.c[i][j])
    }

    pub fn vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.b)
    }

    fn validate(&self) -> Result<()> {
        let n = self.b.len();
        if n == 0 {
            return Err(Error::data("covariance model has no predictors"));
        }
        if self.c.len() != n || self.c.iter().any(|r| r.len() != n) {
            return Err(Error::data(format!(
                "C must be {n}x{n} to match b of length {n}"
            )));
        }
        if self.b.iter().chain(self.c.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::data("covariance model has non-finite entries"));
        }
        for i in 0..n {
            if (self.c[i][i] - 1.0).abs() > 1e-8 {
                return Err(Error::data(format!(
                    "C[{i}][{i}] = {} but predictors must be standardized",
                    self.c[i][i]
                )));
            }
            for j in 0..i {
                if (self.c[i][j] - self.c[j][i]).abs() > 1e-10 {
                    return Err(Error::data(format!("C is not symmetric at ({i}, {j})")));
                }
            }
        }
        let eig = linalg::symmetric_eigenvalues(&self.matrix());
        if eig.first().copied().unwrap_or(0.0) < -1e-10 {
            return Err(Error::data(format!(
                "C is not positive semidefinite (smallest eigenvalue {})",
                eig[0]
            )));
        }
        Ok(())
    }
}
