use nalgebra::{DMatrix, DVector};

use super::data::CovarianceModel;
use super::oracle::SetFunction;
use crate::error::Result;
use crate::index_set::IndexSet;
use crate::linalg;

/// Squared multiple correlation `b_Sᵀ C_S⁻¹ b_S`.
pub fn eval_r2(model: &CovarianceModel, s: &IndexSet) -> Result<f64> {
    R2Objective::new(model).eval(s)
}

pub struct R2Objective {
    c: DMatrix<f64>,
    b: DVector<f64>,
}

impl R2Objective {
    pub fn new(model: &CovarianceModel) -> Self {
        R2Objective {
            c: model.matrix(),
            b: model.vector(),
        }
    }
}

impl SetFunction for R2Objective {
    fn ground_size(&self) -> usize {
        self.b.len()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let c = linalg::principal_submatrix(&self.c, set.as_slice());
        let b = linalg::subvector(&self.b, set.as_slice());
        linalg::inverse_quadratic_form(&c, &b)
    }

    fn name(&self) -> &str {
        "r2"
    }
}
