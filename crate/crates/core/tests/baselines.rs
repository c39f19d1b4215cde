mod common;

use common::*;
use dashsel::baselines::*;
use dashsel::harness::generate_regression;
use dashsel::objectives::*;
use dashsel::verify::{make_r2_counterexample, make_toy_weak, submodularity_ratio};
use dashsel::IndexSet;
use nalgebra::DMatrix;
use rand::Rng;

#[test]
fn greedy_matches_top_k_on_modular() {
    let o = modular(vec![0.3, 2.0, 1.1, 4.0, 0.0, 2.5, 1.9]);
    for k in 0..=7 {
        let g = greedy_sds_ma(&o, k).unwrap();
        let t = top_k(&o, k).unwrap();
        if k < 7 {
            assert_eq!(g.selected, t.selected, "k = {k}");
        }
        assert!(close(g.value, brute_max(&o, k), 1e-12));
        assert!(close(t.value, brute_max(&o, k), 1e-12));
    }
}

#[test]
fn greedy_reaches_the_optimum_on_the_weak_toy() {
    for k in [2, 4, 6] {
        let res = greedy_sds_ma(&make_toy_weak(k), k).unwrap();
        assert_eq!(res.value, k as f64);
        assert_eq!(res.selected.len(), k);
    }
}

#[test]
fn greedy_solves_the_r2_counterexample() {
    let (o, _) = make_r2_counterexample();
    let res = greedy_sds_ma(&o, 2).unwrap();
    assert!(close(res.value, 1.0, 1e-9));
    // one of x4/x5/x6 first, then its complement among x1..x3
    let first = *res.selected.iter().find(|&&a| a >= 3).unwrap();
    assert!(res.selected.contains(first - 3));
}

#[test]
fn parallel_greedy_is_identical_to_sequential() {
    let data = random_dataset(20, 15, 1);
    let o = Oracle::new(RegressionObjective::new(&data));
    let seq = greedy_sds_ma(&o, 6).unwrap();
    let one = greedy_parallel(&o, 6, 1).unwrap();
    assert_eq!(seq.selected, one.selected);
    assert_eq!(seq.value.to_bits(), one.value.to_bits());
    assert_eq!(seq.trace.adaptive_rounds, one.trace.adaptive_rounds);
    assert_eq!(seq.trace.total_queries, one.trace.total_queries);
    let eight = greedy_parallel(&o, 6, 8).unwrap();
    assert_eq!(seq.selected, eight.selected);
    assert_eq!(seq.value.to_bits(), eight.value.to_bits());
}

#[test]
fn parallel_greedy_agrees_across_workers_on_generated_data() {
    let data = generate_regression(500, 1000, 100, 0.4, 3).unwrap();
    let o = Oracle::new(RegressionObjective::new(&data));
    let reference = greedy_parallel(&o, 50, 1).unwrap();
    for w in [2, 4, 8] {
        let res = greedy_parallel(&o, 50, w).unwrap();
        assert_eq!(res.selected, reference.selected, "workers = {w}");
    }
}

#[test]
fn top_k_on_the_weak_toy_picks_v_elements() {
    let toy = make_toy_weak(3);
    let res = top_k(&toy, 2).unwrap();
    assert_eq!(res.selected, IndexSet::from_unsorted([3, 4]));
    assert_eq!(res.value, 1.0);
    assert_eq!(brute_max(&toy, 2), 2.0);
}

#[test]
fn top_k_is_optimal_for_orthogonal_standardized_features() {
    // Columns 1..8 of an 8×8 Sylvester–Hadamard matrix: mean 0, variance 1, orthogonal.
    let h = |i: usize, j: usize| if (i & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let x = DMatrix::from_fn(8, 7, |i, j| h(i, j + 1));
    let y = gaussian_vector(8, 4);
    let data = Dataset::new(x, y).unwrap();
    let o = Oracle::new(RegressionObjective::new(&data));
    for k in 1..=7 {
        let res = top_k(&o, k).unwrap();
        assert!(res.value >= brute_max(&o, k) - 1e-9, "k = {k}");
    }
}

#[test]
fn random_k_edge_budgets() {
    let o = modular(vec![1.0, 2.0, 3.0]);
    let full = random_k(&o, 3, &mut rng(1)).unwrap();
    assert_eq!(full.selected, IndexSet::full(3));
    let none = random_k(&o, 0, &mut rng(1)).unwrap();
    assert!(none.selected.is_empty());
    assert_eq!(none.value, 0.0);
    assert_eq!(none.trace.adaptive_rounds, 1);
}

#[test]
fn random_k_mean_matches_enumeration() {
    let toy = make_toy_weak(3);
    let pairs: Vec<f64> = subsets_up_to(6, 2)
        .into_iter()
        .filter(|s| s.len() == 2)
        .map(|s| toy.function().eval(&IndexSet::from_unsorted(s)).unwrap())
        .collect();
    let mean = pairs.iter().sum::<f64>() / pairs.len() as f64;
    let var = pairs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / pairs.len() as f64;
    let trials = 10_000;
    let total: f64 = (0..trials).map(|seed| random_k(&toy, 2, &mut rng(seed)).unwrap().value).sum();
    let est = total / trials as f64;
    let se = (var / trials as f64).sqrt();
    assert!((est - mean).abs() <= 3.0 * se, "{est} vs {mean} ± {se}");
}

#[test]
fn greedy_rounds_and_monotone_series() {
    let data = random_dataset(30, 12, 5);
    let o = Oracle::new(RegressionObjective::new(&data));
    for k in [0, 1, 5, 12] {
        let res = greedy_sds_ma(&o, k).unwrap();
        assert_eq!(res.trace.adaptive_rounds, k as u64);
        let series: Vec<f64> = res.trace.rounds.iter().map(|r| r.value).collect();
        assert_eq!(series.len(), k);
        assert!(series.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn greedy_meets_the_weak_submodular_bound() {
    let mut r = rng(6);
    for seed in 0..10u64 {
        let n = r.random_range(5..=9);
        let k = r.random_range(1..=4);
        let data = random_dataset(12, n, 300 + seed);
        let o = Oracle::new(RegressionObjective::new(&data));
        let gamma = submodularity_ratio(&o, k).unwrap().gamma_hat.min(1.0);
        let res = greedy_sds_ma(&o, k).unwrap();
        let opt = brute_max(&o, k);
        assert!(res.value >= (1.0 - (-gamma).exp()) * opt - 1e-9, "seed {seed}");
    }
}

#[test]
fn budgets_beyond_the_ground_set_are_rejected() {
    let o = modular(vec![1.0, 2.0]);
    assert!(matches!(greedy_sds_ma(&o, 3), Err(dashsel::Error::Size(_))));
    assert!(matches!(top_k(&o, 3), Err(dashsel::Error::Size(_))));
    assert!(matches!(random_k(&o, 3, &mut rng(0)), Err(dashsel::Error::Size(_))));
}

#[test]
fn baseline_names_parse() {
    for (s, k) in [("greedy", BaselineKind::Greedy), ("greedy_parallel", BaselineKind::GreedyParallel), ("top_k", BaselineKind::TopK), ("random", BaselineKind::Random)] {
        assert_eq!(s.parse::<BaselineKind>().unwrap(), k);
        assert_eq!(k.as_str(), s);
    }
    assert!("lasso".parse::<BaselineKind>().is_err());
}
