//! Brute-force ground truth, ratio measurements, spectral certificates and
//! the small constructions on which plain adaptive sampling fails.

mod brute;
mod ratios;
mod spectral;
mod stall;
mod toys;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use brute::{brute_force_opt, BRUTE_FORCE_LIMIT};
pub use ratios::{
    diff_submodularity_exhaustive, diff_submodularity_witness, submodularity_ratio, RatioReport,
    Witness, ZERO_GAIN_RTOL,
};
pub use spectral::{
    sampled_spectrum, sandwich_check, spectral_gamma, spectral_gamma_from_covariance,
    SampledSpectrum, SandwichReport, SpectralBounds, PSD_RTOL, SANDWICH_RTOL,
};
pub use stall::{demonstrate_stall, stall_params, StallReport};
pub use toys::{
    make_r2_counterexample, make_toy_capped, make_toy_weak, r2_counterexample_dataset, ToyWeak,
};

use crate::baselines::greedy_sds_ma;
use crate::error::Result;
use crate::index_set::IndexSet;

/// Tolerance for printed closed-form values.
pub const VALUE_TOL: f64 = 1e-9;

/// Machine-readable outcome of a verification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub instances: usize,
    pub violations: usize,
    pub witnesses: Vec<serde_json::Value>,
    pub tolerances: BTreeMap<String, f64>,
}

impl VerifyReport {
    pub fn new(check: &str) -> Self {
        VerifyReport {
            check: check.to_string(),
            instances: 0,
            violations: 0,
            witnesses: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, name: &str, passed: bool, observed: serde_json::Value, expected: serde_json::Value) {
        self.instances += 1;
        if !passed {
            self.violations += 1;
        }
        self.witnesses.push(json!({
            "name": name,
            "passed": passed,
            "observed": observed,
            "expected": expected,
        }));
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOL
}

/// The toy and R² constructions: printed values, greedy and brute-force
/// optima, ratio bounds, and the stall demonstrations.
pub fn counterexample_suite() -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("counterexamples");
    rep.tolerances.insert("value".into(), VALUE_TOL);
    rep.tolerances.insert("ratio".into(), 1e-12);

    let (r2, _) = make_r2_counterexample();
    let x = |i: usize| i - 1;
    for (set, expected, label) in [
        (vec![x(4), x(5)], 2.0 / 3.0, "r2{x4,x5}"),
        (vec![x(4)], 0.5, "r2{x4}"),
        (vec![x(1), x(4)], 1.0, "r2{x1,x4}"),
        (vec![x(3), x(6)], 1.0, "r2{x3,x6}"),
    ] {
        let v = r2.eval(&IndexSet::from_unsorted(set))?;
        rep.record(label, close(v, expected), json!(v), json!(expected));
    }

    let capped = make_toy_capped();
    let toy = ToyWeak::capped(2, 2);
    for (set, expected, label) in [
        (vec![toy.v(1), toy.v(2)], 1.0, "capped{v1,v2}"),
        (vec![toy.u(1), toy.v(1)], 2.0, "capped{u1,v1}"),
        (vec![], 0.0, "capped{}"),
    ] {
        let v = capped.eval(&IndexSet::from_unsorted(set))?;
        rep.record(label, close(v, expected), json!(v), json!(expected));
    }
    let too_big = capped.eval(&IndexSet::from_unsorted([0, 1, 2])).is_err();
    rep.record("capped rejects |S| = 3", too_big, json!(too_big), json!(true));

    for k in [2usize, 4, 6] {
        let weak = make_toy_weak(k);
        let g = greedy_sds_ma(&weak, k)?;
        rep.record(&format!("greedy weak toy k={k}"), close(g.value, k as f64), json!(g.value), json!(k));
    }
    let g = greedy_sds_ma(&r2, 2)?;
    rep.record("greedy r2 k=2", close(g.value, 1.0), json!(g.value), json!(1.0));

    let (_, opt) = brute_force_opt(&make_toy_weak(4), 4)?;
    rep.record("brute force weak toy k=4", close(opt, 4.0), json!(opt), json!(4.0));
    let (_, opt) = brute_force_opt(&r2, 2)?;
    rep.record("brute force r2 k=2", close(opt, 1.0), json!(opt), json!(1.0));

    let gamma = submodularity_ratio(&make_toy_weak(3), 6)?.gamma_hat;
    rep.record("weak toy gamma >= 0.5", gamma >= 0.5 - 1e-12, json!(gamma), json!(">= 0.5"));
    let alpha = diff_submodularity_exhaustive(&capped, 2)?.alpha_hat;
    rep.record("capped toy alpha >= 0.25", alpha >= 0.25 - 1e-12, json!(alpha), json!(">= 0.25"));

    let p = stall_params(2).with_alpha(1.0).with_opt(2.0);
    let s = demonstrate_stall(&capped, 2, &p)?;
    rep.record("capped toy stalls at alpha=1", s.stall, json!(s), json!({"stall": true}));
    let p = stall_params(2).with_alpha(1.0).with_opt(1.0);
    let s = demonstrate_stall(&r2, 2, &p)?;
    rep.record("r2 stalls at alpha=1", s.stall, json!(s), json!({"stall": true}));
    let p = stall_params(2).with_alpha(0.5).with_opt(2.0);
    let s = demonstrate_stall(&capped, 2, &p)?;
    rep.record(
        "capped toy terminates at alpha=0.5",
        !s.stall && s.value >= 1.0,
        json!(s),
        json!({"stall": false, "value": ">= 1"}),
    );
    Ok(rep)
}
