//! Subset selection for differentially submodular objectives.
//!
//! The crate provides statistical set functions (regression fit, R²,
//! logistic likelihood, Bayesian A-optimal design), a low-adaptivity
//! selector built on adaptive sampling ([`solver::dash`]), classical
//! baselines, brute-force verification tools, and an experiment harness.
//!
//! ```
//! use dashsel::objectives::{Modular, Oracle};
//! use dashsel::solver::{dash, DashParams};
//!
//! let oracle = Oracle::new(Modular::new(vec![3.0, 1.0, 2.0, 5.0]).unwrap());
//! let params = DashParams::new(2, 1, 0.1).with_seed(7);
//! let result = dash(&oracle, &params, 8.0, 1.0).unwrap();
//! assert!(result.selected.len() <= 2);
//! ```

pub mod baselines;
pub mod error;
pub mod harness;
pub mod index_set;
pub mod linalg;
pub mod objectives;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use index_set::IndexSet;
