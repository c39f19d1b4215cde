use serde::{Deserialize, Serialize};

use super::oracle::SetFunction;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Concave-over-cardinality diversity term `d(S) = Σ_g w_g √|S ∩ g|`.
///
/// Monotone and submodular for nonnegative weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiversityFunction {
    pub groups: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

impl DiversityFunction {
    pub fn new(groups: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        let d = DiversityFunction { groups, weights };
        if d.groups.len() != d.weights.len() {
            return Err(Error::data(format!(
                "{} diversity groups but {} weights",
                d.groups.len(),
                d.weights.len()
            )));
        }
        if let Some(w) = d.weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::data(format!("diversity weight {w} must be finite and >= 0")));
        }
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiversityFunction = serde_json::from_str(text)?;
        Self::new(raw.groups, raw.weights)
    }

    /// Checks that every element of `{0, .., n-1}` is covered and no index is out of range.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        let mut covered = vec![false; n];
        for g in &self.groups {
            for &a in g {
                if a >= n {
                    return Err(Error::data(format!(
                        "diversity group index {a} out of range for {n} elements"
                    )));
                }
                covered[a] = true;
            }
        }
        match covered.iter().position(|c| !c) {
            Some(a) => Err(Error::data(format!("element {a} belongs to no diversity group"))),
            None => Ok(()),
        }
    }

    /// One group per element, unit weight each.
    pub fn singletons(n: usize, weight: f64) -> Self {
        DiversityFunction {
            groups: (0..n).map(|a| vec![a]).collect(),
            weights: vec![weight; n],
        }
    }

    pub fn eval(&self, s: &IndexSet) -> f64 {
        self.groups
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| {
                let hits = g.iter().filter(|&&a| s.contains(a)).count();
                w * (hits as f64).sqrt()
            })
            .sum()
    }
}

pub fn eval_diversity(d: &DiversityFunction, s: &IndexSet) -> f64 {
    d.eval(s)
}

/// A diversity term used as a stand-alone set function.
pub struct DiversityObjective {
    pub diversity: DiversityFunction,
    pub n: usize,
}

impl SetFunction for DiversityObjective {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        Ok(self.diversity.eval(set))
    }

    fn name(&self) -> &str {
        "diversity"
    }
}

/// `base(S) + d(S)`.
pub struct WithDiversity {
    pub base: Box<dyn SetFunction>,
    pub diversity: DiversityFunction,
    label: String,
}

impl WithDiversity {
    pub fn new(base: Box<dyn SetFunction>, diversity: DiversityFunction) -> Result<Self> {
        diversity.validate_for(base.ground_size())?;
        let label = format!("{}+diversity", base.name());
        Ok(WithDiversity {
            base,
            diversity,
            label,
        })
    }
}

impl SetFunction for WithDiversity {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, set: &IndexSet) -> Result<f64> {
        Ok(self.base.eval(set)? + self.diversity.eval(set))
    }

    fn name(&self) -> &str {
        &self.label
    }
}
