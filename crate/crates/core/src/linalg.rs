//! Small dense linear-algebra helpers shared by the objectives.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Ridge added to a restricted Gram matrix that is numerically singular.
pub const RIDGE_JITTER: f64 = 1e-10;

/// Relative pivot size below which a Cholesky factor is treated as singular.
const PIVOT_RTOL: f64 = 1e-12;

/// Cholesky factor of a symmetric positive (semi)definite matrix, with the
/// ridge that had to be added to obtain it.
pub struct SpdFactor {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

fn well_conditioned(chol: &Cholesky<f64, Dyn>, scale: f64) -> bool {
    let l = chol.l_dirty();
    (0..l.nrows()).all(|i| {
        let p = l[(i, i)];
        p.is_finite() && p * p > PIVOT_RTOL * scale
    })
}

/// Factorizes `a`, adding `RIDGE_JITTER * I` (escalated by 10x up to a fixed
/// number of attempts) when the matrix is numerically singular.
pub fn factor_spd(a: &DMatrix<f64>) -> Result<SpdFactor> {
    let n = a.nrows();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(1.0f64, f64::max);
    if let Some(chol) = Cholesky::new(a.clone()) {
        if well_conditioned(&chol, scale) {
            return Ok(SpdFactor { chol, jitter: 0.0 });
        }
    }
    let mut jitter = RIDGE_JITTER;
    for _ in 0..12 {
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(m) {
            return Ok(SpdFactor { chol, jitter });
        }
        jitter *= 10.0;
    }
    Err(Error::Numeric(format!(
        "matrix of order {n} is not positive semidefinite"
    )))
}

/// Returns `bᵀ A⁻¹ b` for symmetric positive semidefinite `A`.
pub fn inverse_quadratic_form(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let f = factor_spd(a)?;
    let z = f
        .chol
        .l_dirty()
        .solve_lower_triangular(b)
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    Ok(z.norm_squared())
}

/// Solves `A x = b` for symmetric positive semidefinite `A`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() == 0 {
        return Ok(DVector::zeros(0));
    }
    let f = factor_spd(a)?;
    Ok(f.chol.solve(b))
}

/// Trace of the inverse of a symmetric positive definite matrix.
pub fn trace_of_inverse(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let f = factor_spd(a)?;
    let inv = f.chol.inverse();
    Ok(inv.trace())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

/// Principal submatrix on `idx`.
pub fn principal_submatrix(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

pub fn subvector(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

/// Spectral norm (largest singular value) of a dense matrix.
pub fn spectral_norm(x: &DMatrix<f64>) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let gram = if x.nrows() <= x.ncols() {
        x * x.transpose()
    } else {
        x.transpose() * x
    };
    symmetric_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}
