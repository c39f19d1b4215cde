//! Statistical set functions and the oracle that meters queries to them.
//!
//! Every built-in objective is normalized (`f(∅) = 0`), monotone, and pure.
//! [`make_oracle`] assembles one of them, optionally plus a submodular
//! diversity term, behind an [`Oracle`].

mod aopt;
mod data;
mod diversity;
mod logistic;
mod modular;
mod oracle;
mod r2;
mod regression;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aopt::{eval_aopt, eval_aopt_direct, AOptObjective, AOptParams};
pub use data::{CovarianceModel, Dataset};
pub(crate) use data::standardize_in_place;
pub use diversity::{eval_diversity, DiversityFunction, DiversityObjective, WithDiversity};
pub use logistic::{
    eval_class, fit_logistic, log_likelihood, LogisticObjective, LOGISTIC_MAX_ITER,
    LOGISTIC_RIDGE, LOGISTIC_TOL,
};
pub use modular::Modular;
pub use oracle::{Oracle, SetFunction, Tally};
pub(crate) use oracle::{build_pool, Metered};
pub use r2::{eval_r2, R2Objective};
pub use regression::{eval_reg, fit_least_squares, FitResult, RegressionObjective};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Reg,
    R2,
    Class,
    Aopt,
}

impl ObjectiveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::Reg => "reg",
            ObjectiveKind::R2 => "r2",
            ObjectiveKind::Class => "class",
            ObjectiveKind::Aopt => "aopt",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reg" => Ok(ObjectiveKind::Reg),
            "r2" => Ok(ObjectiveKind::R2),
            "class" => Ok(ObjectiveKind::Class),
            "aopt" => Ok(ObjectiveKind::Aopt),
            other => Err(Error::config(format!(
                "unknown objective '{other}' (expected reg, r2, class or aopt)"
            ))),
        }
    }
}

/// What an objective is computed from.
#[derive(Clone, Debug)]
pub enum ObjectiveSource {
    Data(Dataset),
    Covariance(CovarianceModel),
}

/// Builds the set function for `kind` without wrapping it in an oracle.
pub fn make_set_function(
    kind: ObjectiveKind,
    source: &ObjectiveSource,
    aopt: Option<AOptParams>,
    diversity: Option<DiversityFunction>,
) -> Result<Box<dyn SetFunction>> {
    let base: Box<dyn SetFunction> = match (kind, source) {
        (ObjectiveKind::Reg, ObjectiveSource::Data(d)) => Box::new(RegressionObjective::new(d)),
        (ObjectiveKind::Class, ObjectiveSource::Data(d)) => Box::new(LogisticObjective::new(d)?),
        (ObjectiveKind::Aopt, ObjectiveSource::Data(d)) => {
            let p = aopt.ok_or_else(|| {
                Error::config("the aopt objective requires beta and sigma parameters")
            })?;
            Box::new(AOptObjective::new(d, p)?)
        }
        (ObjectiveKind::R2, ObjectiveSource::Data(d)) => {
            Box::new(R2Objective::new(&CovarianceModel::from_dataset(d)?))
        }
        (ObjectiveKind::R2, ObjectiveSource::Covariance(m)) => Box::new(R2Objective::new(m)),
        (k, ObjectiveSource::Covariance(_)) => {
            return Err(Error::config(format!(
                "the {k} objective needs a dataset, not a covariance model"
            )))
        }
    };
    match diversity {
        Some(div) => Ok(Box::new(WithDiversity::new(base, div)?)),
        None => Ok(base),
    }
}

/// Builds a metered oracle for `kind`, plus the optional diversity term.
pub fn make_oracle(
    kind: ObjectiveKind,
    source: &ObjectiveSource,
    aopt: Option<AOptParams>,
    diversity: Option<DiversityFunction>,
) -> Result<Oracle> {
    let f = make_set_function(kind, source, aopt, diversity)?;
    Ok(Oracle::from_arc(std::sync::Arc::from(f)))
}

/// `f_S(A) = f(S ∪ A) − f(S)`, as two queries in one round.
pub fn marginal(
    oracle: &Oracle,
    s: &crate::IndexSet,
    a: &crate::IndexSet,
) -> Result<f64> {
    oracle.marginal(s, a)
}
