mod common;

use common::*;
use dashsel::harness::generate_regression;
use dashsel::objectives::*;
use dashsel::verify::*;
use dashsel::IndexSet;
use nalgebra::DMatrix;

fn set(items: &[usize]) -> IndexSet {
    IndexSet::from_unsorted(items.iter().copied())
}

fn hadamard_standardized(d: usize, n: usize) -> Dataset {
    let h = |i: usize, j: usize| if (i & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let x = DMatrix::from_fn(d, n, |i, j| h(i, j + 1));
    Dataset::new(x, gaussian_vector(d, 77)).unwrap()
}

fn equicorrelation(n: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho })
}

#[test]
fn brute_force_on_known_instances() {
    for k in [2, 4] {
        assert_eq!(brute_force_opt(&make_toy_weak(k), k).unwrap().1, k as f64);
    }
    let (r2, _) = make_r2_counterexample();
    let (s, v) = brute_force_opt(&r2, 2).unwrap();
    assert!(close(v, 1.0, 1e-9));
    assert_eq!(s, set(&[0, 3]));
    let (s, v) = brute_force_opt(&r2, 0).unwrap();
    assert!(s.is_empty());
    assert_eq!(v, 0.0);
}

#[test]
fn brute_force_matches_reference_enumeration() {
    for seed in 0..5 {
        let data = random_dataset(10, 9, seed);
        let o = Oracle::new(RegressionObjective::new(&data));
        for k in 1..=4 {
            let (s, v) = brute_force_opt(&o, k).unwrap();
            assert!(close(v, brute_max(&o, k), 1e-12));
            assert!(s.len() <= k);
            assert_eq!(o.eval(&s).unwrap(), v);
        }
    }
}

#[test]
fn brute_force_is_invariant_under_relabeling() {
    let data = random_dataset(10, 8, 9);
    let perm = [5usize, 2, 7, 0, 6, 1, 3, 4];
    let x = data.features();
    let permuted = Dataset::new(DMatrix::from_fn(10, 8, |i, j| x[(i, perm[j])]), data.response().clone()).unwrap();
    let a = brute_force_opt(&Oracle::new(RegressionObjective::new(&data)), 3).unwrap().1;
    let b = brute_force_opt(&Oracle::new(RegressionObjective::new(&permuted)), 3).unwrap().1;
    assert!(close(a, b, 1e-10 * a.max(1.0)));
}

#[test]
fn brute_force_guard() {
    let o = modular(vec![1.0; 60]);
    assert!(matches!(brute_force_opt(&o, 30), Err(dashsel::Error::Size(_))));
}

#[test]
fn submodular_and_modular_ratios() {
    let d = DiversityFunction::new(vec![vec![0, 1, 2], vec![2, 3, 4, 5], vec![5, 6]], vec![1.0, 0.5, 2.0]).unwrap();
    let o = Oracle::new(DiversityObjective { diversity: d, n: 7 });
    assert!(submodularity_ratio(&o, 7).unwrap().gamma_hat >= 1.0 - 1e-12);

    let m = modular(vec![0.5, 1.5, 2.0, 0.25, 3.0]);
    let rep = submodularity_ratio(&m, 5).unwrap();
    assert!(close(rep.gamma_hat, 1.0, 1e-12));
    let w = diff_submodularity_witness(&m, 500, 3, &mut rng(1)).unwrap();
    assert!(close(w.alpha_hat, 1.0, 1e-12));
}

#[test]
fn weak_toy_ratio_is_at_least_one_half() {
    for half in [2, 3, 4] {
        let rep = submodularity_ratio(&make_toy_weak(half), 2 * half).unwrap();
        println!("toy with |U| = |V| = {half}: gamma_hat = {}", rep.gamma_hat);
        assert!(rep.gamma_hat >= 0.5 - 1e-12);
    }
}

#[test]
fn capped_toy_alpha_is_at_least_one_quarter() {
    let rep = diff_submodularity_exhaustive(&make_toy_capped(), 2).unwrap();
    println!("capped toy alpha_hat = {}", rep.alpha_hat);
    assert!(rep.alpha_hat >= 0.25 - 1e-12);
}

#[test]
fn toy_values() {
    let toy = ToyWeak::new(3);
    let o = make_toy_weak(3);
    assert_eq!(o.eval(&set(&[toy.v(1)])).unwrap(), 1.0);
    assert_eq!(o.eval(&set(&[toy.u(1)])).unwrap(), 0.0);
    for s in subsets_up_to(3, 3).into_iter().skip(1) {
        let vs: Vec<usize> = s.iter().map(|&i| toy.v(i + 1)).collect();
        assert_eq!(o.eval(&set(&vs)).unwrap(), 1.0);
    }
    let balanced = set(&[toy.u(1), toy.u(2), toy.v(1), toy.v(3)]);
    assert_eq!(o.eval(&balanced).unwrap(), 4.0);

    let capped = make_toy_capped();
    assert_eq!(capped.eval(&set(&[2, 3])).unwrap(), 1.0);
    assert_eq!(capped.eval(&set(&[0, 2])).unwrap(), 2.0);
    assert_eq!(capped.eval(&IndexSet::empty()).unwrap(), 0.0);
    assert!(capped.eval(&set(&[0, 1, 2])).is_err());
}

#[test]
fn r2_counterexample_numbers() {
    let (o, _) = make_r2_counterexample();
    assert!(close(o.eval(&set(&[3, 4])).unwrap(), 2.0 / 3.0, 1e-9));
    assert!(close(o.eval(&set(&[3])).unwrap(), 0.5, 1e-9));
    assert!(close(o.eval(&set(&[2, 5])).unwrap(), 1.0, 1e-9));
    assert!(close(o.eval(&set(&[0, 3])).unwrap(), 1.0, 1e-9));
}

#[test]
fn spectral_gamma_identity_and_equicorrelation() {
    let b = spectral_gamma(&hadamard_standardized(8, 7)).unwrap();
    assert!(close(b.gamma, 1.0, 1e-12));
    assert!(close(b.alpha, 1.0, 1e-12));

    let c = equicorrelation(5, 0.4);
    let b = spectral_gamma_from_covariance(&c).unwrap();
    assert!(close(b.gamma, 0.6 / 2.6, 1e-12));
    let ev = c.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(close(b.gamma, lo / hi, 1e-12));
    assert!(close(b.alpha, b.gamma * b.gamma, 1e-15));
}

#[test]
fn generated_design_certifies_a_positive_gamma() {
    let data = generate_regression(500, 1000, 100, 0.4, 1).unwrap();
    let b = spectral_gamma(&data).unwrap();
    assert!(b.gamma > 0.0, "{b:?}");
}

#[test]
fn non_psd_covariance_is_rejected() {
    let c = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(spectral_gamma_from_covariance(&c).is_err());
}

#[test]
fn sampled_spectrum_never_undercuts_the_global_bound() {
    // Principal submatrices interlace, so subset ratios are at least the global one.
    let data = generate_regression(12, 200, 4, 0.6, 2).unwrap();
    let global = spectral_gamma(&data).unwrap();
    let sampled = sampled_spectrum(&data, 4, 200, &mut rng(3)).unwrap();
    assert!(sampled.gamma >= global.gamma - 1e-12);
    assert!(sampled.lambda_min >= global.lambda_min - 1e-12);
    assert!(sampled.lambda_max <= global.lambda_max + 1e-12);
}

#[test]
fn sandwich_on_orthogonal_features_is_tight() {
    let rep = sandwich_check(&hadamard_standardized(8, 7), 300, &mut rng(4)).unwrap();
    assert_eq!(rep.violations, 0);
    assert!(close(rep.max_ratio, 1.0, 1e-10));
    assert!(close(rep.min_ratio, 1.0, 1e-10));
}

#[test]
fn sandwich_on_equicorrelated_data() {
    let data = generate_regression(8, 400, 4, 0.4, 5).unwrap();
    let rep = sandwich_check(&data, 500, &mut rng(5)).unwrap();
    assert_eq!(rep.violations, 0);
    assert!(rep.gamma > 0.0 && rep.gamma < 1.0);
}

#[test]
fn single_element_sets_are_trivially_tight() {
    let data = generate_regression(8, 100, 4, 0.4, 6).unwrap();
    let o = Oracle::new(RegressionObjective::new(&data));
    let s = set(&[1, 5]);
    let fs = o.eval(&s).unwrap();
    for a in [0, 2, 7] {
        let joint = o.eval(&s.with(a)).unwrap() - fs;
        assert_eq!(joint, o.marginal(&s, &IndexSet::singleton(a)).unwrap());
    }
}

#[test]
fn witness_marginals_sit_inside_the_spectral_sandwich() {
    let data = generate_regression(8, 400, 4, 0.4, 7).unwrap();
    let gamma = spectral_gamma(&data).unwrap().gamma;
    let o = Oracle::new(RegressionObjective::new(&data));
    let rep = diff_submodularity_witness(&o, 1000, 4, &mut rng(7)).unwrap();
    assert!(rep.r_lo >= gamma - 1e-8, "{} < {gamma}", rep.r_lo);
    assert!(rep.r_hi <= 1.0 / gamma + 1e-8, "{} > {}", rep.r_hi, 1.0 / gamma);
}

#[test]
fn stall_demonstrations() {
    let capped = demonstrate_stall(&make_toy_capped(), 2, &stall_params(2)).unwrap();
    assert!(capped.stall);
    let (r2, _) = make_r2_counterexample();
    let r = demonstrate_stall(&r2, 2, &stall_params(2)).unwrap();
    assert!(r.stall);
    assert!(close(r.opt_value, 1.0, 1e-9));
    let half = demonstrate_stall(&make_toy_capped(), 2, &stall_params(2).with_alpha(0.5)).unwrap();
    assert!(!half.stall);
    assert!(half.value >= 1.0);
}

#[test]
fn counterexample_suite_passes() {
    let rep = counterexample_suite().unwrap();
    assert!(rep.passed(), "{}", serde_json::to_string_pretty(&rep).unwrap());
    assert_eq!(rep.violations, 0);
    assert!(rep.instances > 0);
}

#[test]
fn weak_toy_singles_over_v_follow_the_formula() {
    // f({u1, v}) = min(3, 2) = 2 and f({u1}) = 0, so every v contributes 2
    for half in [2, 3, 5] {
        let toy = ToyWeak::new(half);
        let o = make_toy_weak(half);
        let s = set(&[toy.u(1)]);
        let fs = o.eval(&s).unwrap();
        let singles: f64 = (1..=half).map(|i| o.eval(&s.with(toy.v(i))).unwrap() - fs).sum();
        assert_eq!(singles, 2.0 * half as f64);
        let all_v: Vec<usize> = (1..=half).map(|i| toy.v(i)).collect();
        let joint = o.eval(&s.union(&set(&all_v))).unwrap() - fs;
        assert_eq!(joint, 3.0);
    }
}
