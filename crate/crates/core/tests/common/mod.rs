//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerical routines.
#![allow(dead_code)]

use dashsel::objectives::{Dataset, Modular, Oracle};
use dashsel::IndexSet;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every subset of `0..n` with at most `k` elements, in size-then-lexicographic order.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for size in 1..=k.min(n) {
        let mut cur: Vec<usize> = (0..size).collect();
        loop {
            out.push(cur.clone());
            let mut i = size;
            while i > 0 && cur[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
            for j in i..size {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
    out
}

/// Maximum of `f` over all sets with at most `k` elements.
pub fn brute_max(oracle: &Oracle, k: usize) -> f64 {
    subsets_up_to(oracle.ground_size(), k)
        .into_iter()
        .map(|s| oracle.function().eval(&IndexSet::from_unsorted(s)).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut r))
}

pub fn gaussian_vector(len: usize, seed: u64) -> DVector<f64> {
    let mut r = rng(seed);
    DVector::from_fn(len, |_, _| StandardNormal.sample(&mut r))
}

pub fn random_dataset(d: usize, n: usize, seed: u64) -> Dataset {
    Dataset::new(gaussian_matrix(d, n, seed), gaussian_vector(d, seed ^ 0x9e37)).unwrap()
}

/// Columns standardized to mean 0 and population variance 1, response centered.
pub fn standardized_dataset(d: usize, n: usize, seed: u64) -> Dataset {
    let mut x = gaussian_matrix(d, n, seed);
    for mut col in x.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / d as f64).sqrt();
        col /= sd;
    }
    let mut y = gaussian_vector(d, seed ^ 0x51);
    let mean = y.mean();
    y.add_scalar_mut(-mean);
    Dataset::new(x, y).unwrap()
}

/// Columns scaled to unit Euclidean norm.
pub fn unit_columns(d: usize, n: usize, seed: u64) -> Dataset {
    let mut x = gaussian_matrix(d, n, seed);
    for mut col in x.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    Dataset::new(x, DVector::zeros(d)).unwrap()
}

pub fn modular(weights: Vec<f64>) -> Oracle {
    Oracle::new(Modular::new(weights).unwrap())
}

/// Gaussian elimination with partial pivoting on plain vectors.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// `‖y‖² − min_w ‖y − X_S w‖²` through explicit normal equations.
pub fn reference_reg(data: &Dataset, s: &[usize]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let x = data.features();
    let y = data.response();
    let g: Vec<Vec<f64>> = s
        .iter()
        .map(|&i| s.iter().map(|&j| x.column(i).dot(&x.column(j))).collect())
        .collect();
    let b: Vec<f64> = s.iter().map(|&i| x.column(i).dot(y)).collect();
    let w = gauss_solve(g, b.clone());
    w.iter().zip(&b).map(|(a, c)| a * c).sum()
}

/// `Tr(β⁻²I) − Tr((β²I + σ⁻² X_S X_Sᵀ)⁻¹)` by explicit `d×d` inversion.
pub fn reference_aopt(x: &DMatrix<f64>, s: &[usize], beta: f64, sigma: f64) -> f64 {
    let d = x.nrows();
    let mut p = DMatrix::<f64>::identity(d, d) * (beta * beta);
    for &j in s {
        let c = x.column(j);
        p += (c * c.transpose()) / (sigma * sigma);
    }
    let inv = p.try_inverse().unwrap();
    d as f64 / (beta * beta) - inv.trace()
}

/// Largest singular value via power iteration on `XᵀX`.
pub fn spectral_norm(x: &DMatrix<f64>) -> f64 {
    let g = x.transpose() * x;
    let mut v = DVector::from_element(g.nrows(), 1.0);
    for _ in 0..2000 {
        let w = &g * &v;
        v = &w / w.norm();
    }
    (v.dot(&(&g * &v))).sqrt()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
