use rand::Rng;
use serde::{Deserialize, Serialize};

use super::brute::all_values;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::Oracle;
use crate::solver::sample_uniform_subset;

/// Marginal gains at or below this (relative) size are treated as zero.
pub const ZERO_GAIN_RTOL: f64 = 1e-12;

/// An `(S, A)` pair attaining one of the reported extremes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub s: IndexSet,
    pub a: IndexSet,
    /// `f_S(A)`.
    pub joint_gain: f64,
    /// `Σ_{a∈A} f_S(a)`.
    pub sum_of_singles: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// Minimum of `Σ f_S(a) / f_S(A)`.
    pub gamma_hat: f64,
    /// `min(r_lo, 1) / max(r_hi, 1)` with `r = f_S(A) / Σ f_S(a)`.
    pub alpha_hat: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub witness_sets: Vec<Witness>,
    /// Pairs examined, including skipped ones.
    pub samples_used: usize,
    /// Pairs with `f_S(A) = Σ f_S(a) = 0`.
    pub skipped: usize,
}

#[derive(Default)]
struct Scan {
    gamma: Option<(f64, IndexSet, IndexSet, f64, f64)>,
    lo: Option<(f64, IndexSet, IndexSet, f64, f64)>,
    hi: Option<(f64, IndexSet, IndexSet, f64, f64)>,
    pairs: usize,
    skipped: usize,
}

impl Scan {
    fn observe(&mut self, s: &IndexSet, a: &IndexSet, joint: f64, sum: f64, scale: f64) {
        self.pairs += 1;
        let tol = ZERO_GAIN_RTOL * scale.abs().max(1.0);
        let joint_zero = joint.abs() <= tol;
        let sum_zero = sum.abs() <= tol;
        if joint_zero && sum_zero {
            self.skipped += 1;
            return;
        }
        let better = |slot: &Option<(f64, IndexSet, IndexSet, f64, f64)>, v: f64, lower: bool| {
            slot.as_ref().is_none_or(|(b, ..)| if lower { v < *b } else { v > *b })
        };
        if !joint_zero {
            let g = sum / joint;
            if better(&self.gamma, g, true) {
                self.gamma = Some((g, s.clone(), a.clone(), joint, sum));
            }
        }
        let r = if sum_zero { f64::INFINITY } else { joint / sum };
        if better(&self.lo, r, true) {
            self.lo = Some((r, s.clone(), a.clone(), joint, sum));
        }
        if better(&self.hi, r, false) {
            self.hi = Some((r, s.clone(), a.clone(), joint, sum));
        }
    }

    fn report(self) -> RatioReport {
        let r_lo = self.lo.as_ref().map_or(1.0, |w| w.0);
        let r_hi = self.hi.as_ref().map_or(1.0, |w| w.0);
        let alpha_hat = (r_lo.min(1.0) / r_hi.max(1.0)).clamp(0.0, 1.0);
        let mut witness_sets = Vec::new();
        for (label, w) in [("gamma", &self.gamma), ("r_lo", &self.lo), ("r_hi", &self.hi)] {
            if let Some((ratio, s, a, joint, sum)) = w {
                witness_sets.push(Witness {
                    label: label.to_string(),
                    s: s.clone(),
                    a: a.clone(),
                    joint_gain: *joint,
                    sum_of_singles: *sum,
                    ratio: *ratio,
                });
            }
        }
        RatioReport {
            gamma_hat: self.gamma.as_ref().map_or(1.0, |w| w.0),
            alpha_hat,
            r_lo,
            r_hi,
            witness_sets,
            samples_used: self.pairs,
            skipped: self.skipped,
        }
    }
}

fn scan_table(table: &[Option<f64>], n: usize, max_a: usize, max_union: usize) -> Scan {
    let mut scan = Scan::default();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for s_mask in 0..(1u64 << n) {
        let Some(fs) = table[s_mask as usize] else { continue };
        let rest = full & !s_mask;
        let mut a_mask = rest;
        while a_mask != 0 {
            let size = a_mask.count_ones() as usize;
            let union = s_mask | a_mask;
            if size <= max_a && (union.count_ones() as usize) <= max_union {
                if let Some(fu) = table[union as usize] {
                    let mut sum = 0.0;
                    let mut bits = a_mask;
                    while bits != 0 {
                        let b = bits & bits.wrapping_neg();
                        sum += table[(s_mask | b) as usize].expect("singleton extension within union bound") - fs;
                        bits &= bits - 1;
                    }
                    scan.observe(
                        &IndexSet::from_mask(s_mask),
                        &IndexSet::from_mask(a_mask),
                        fu - fs,
                        sum,
                        fu,
                    );
                }
            }
            a_mask = (a_mask - 1) & rest;
        }
    }
    scan
}

/// Exact submodularity ratio over all `S` and all disjoint `A` with `|A| ≤ k_max`.
///
/// Requires `n ≤ 12`. Pairs with `f_S(A) = 0` do not enter `gamma_hat`.
pub fn submodularity_ratio(oracle: &Oracle, k_max: usize) -> Result<RatioReport> {
    let n = oracle.ground_size();
    if n > 12 {
        return Err(Error::Size(format!(
            "exact submodularity ratio needs n <= 12, got {n}"
        )));
    }
    let table = all_values(oracle, n)?;
    Ok(scan_table(&table, n, k_max.max(1), n).report())
}

/// Ratio scan over every disjoint `(S, A)` with `|S ∪ A| ≤ max_union`.
pub fn diff_submodularity_exhaustive(oracle: &Oracle, max_union: usize) -> Result<RatioReport> {
    let n = oracle.ground_size();
    if n > 14 {
        return Err(Error::Size(format!(
            "exhaustive pair scan needs n <= 14, got {n}"
        )));
    }
    let table = all_values(oracle, max_union.min(n))?;
    Ok(scan_table(&table, n, n, max_union).report())
}

/// Sampled probe of how far `f_S(A)` strays from `Σ f_S(a)`.
///
/// Each sample draws `|S|` uniformly from `0..=set_size`, then `A` of size
/// `1..=set_size` from the rest. All queries form one round. The result is
/// an empirical diagnostic, not a certificate.
pub fn diff_submodularity_witness<R: Rng + ?Sized>(
    oracle: &Oracle,
    n_samples: usize,
    set_size: usize,
    rng: &mut R,
) -> Result<RatioReport> {
    if n_samples == 0 {
        return Err(Error::config("at least one sample is required"));
    }
    let n = oracle.ground_size();
    if n == 0 {
        return Ok(Scan::default().report());
    }
    let set_size = set_size.max(1);
    let full = IndexSet::full(n);
    let mut pairs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let s_len = rng.random_range(0..=set_size.min(n - 1));
        let s = sample_uniform_subset(&full, s_len, rng);
        let rest = full.difference(&s);
        let a_len = rng.random_range(1..=set_size.min(rest.len()));
        let a = sample_uniform_subset(&rest, a_len, rng);
        pairs.push((s, a));
    }
    let mut sets = Vec::new();
    for (s, a) in &pairs {
        sets.push(s.clone());
        sets.push(s.union(a));
        sets.extend(a.iter().map(|&x| s.with(x)));
    }
    let values = oracle.eval_batch(&sets)?;
    let mut scan = Scan::default();
    let mut cursor = 0;
    for (s, a) in &pairs {
        let fs = values[cursor];
        let fu = values[cursor + 1];
        let sum: f64 = values[cursor + 2..cursor + 2 + a.len()].iter().map(|v| v - fs).sum();
        cursor += 2 + a.len();
        scan.observe(s, a, fu - fs, sum, fu);
    }
    Ok(scan.report())
}
