use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::csv_io::load_csv;
use super::generate::{generate_classification_with, generate_design, generate_regression_with, SyntheticSpec};
use crate::baselines::{greedy_parallel, greedy_sds_ma, random_k, top_k};
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::objectives::{
    make_oracle, AOptParams, CovarianceModel, DiversityFunction, ObjectiveKind,
    ObjectiveSource, Oracle,
};
use crate::solver::{dash_with_guessing, DashParams, SelectionResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dash,
    Greedy,
    GreedyParallel,
    TopK,
    Random,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Dash => "dash",
            Algorithm::Greedy => "greedy",
            Algorithm::GreedyParallel => "greedy_parallel",
            Algorithm::TopK => "top_k",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dash" => Ok(Algorithm::Dash),
            "greedy" => Ok(Algorithm::Greedy),
            "greedy_parallel" => Ok(Algorithm::GreedyParallel),
            "top_k" | "topk" => Ok(Algorithm::TopK),
            "random" => Ok(Algorithm::Random),
            other => Err(Error::config(format!(
                "unknown algorithm '{other}' (expected dash, greedy, greedy_parallel, top_k or random)"
            ))),
        }
    }
}

/// Where an experiment's data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Regression(SyntheticSpec),
    Classification(SyntheticSpec),
    Design { n: usize, d: usize, rho: f64, seed: u64 },
    Csv { features: PathBuf, response: Option<PathBuf> },
    Covariance { path: PathBuf },
}

impl DataSource {
    pub fn load(&self) -> Result<ObjectiveSource> {
        Ok(match self {
            DataSource::Regression(spec) => ObjectiveSource::Data(generate_regression_with(spec)?.0),
            DataSource::Classification(spec) => {
                ObjectiveSource::Data(generate_classification_with(spec, None)?.0)
            }
            DataSource::Design { n, d, rho, seed } => {
                ObjectiveSource::Data(generate_design(*n, *d, *rho, *seed)?)
            }
            DataSource::Csv { features, response } => {
                let (data, summary) = load_csv(features, response.as_deref())?;
                info!(
                    "loaded {} observations of {} features (header: {})",
                    summary.d, summary.n, summary.features_header
                );
                ObjectiveSource::Data(data)
            }
            DataSource::Covariance { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                ObjectiveSource::Covariance(CovarianceModel::from_json(&text)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub objective: ObjectiveKind,
    pub source: DataSource,
    pub algorithms: Vec<Algorithm>,
    /// One value for accuracy-vs-rounds, a sweep for accuracy-vs-k.
    pub ks: Vec<usize>,
    pub dash: DashParams,
    pub aopt: Option<AOptParams>,
    pub diversity: Option<DiversityFunction>,
    pub repetitions: usize,
    pub workers: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(objective: ObjectiveKind, source: DataSource) -> Self {
        ExperimentConfig {
            objective,
            source,
            algorithms: vec![Algorithm::Dash, Algorithm::Greedy, Algorithm::TopK, Algorithm::Random],
            ks: vec![10],
            dash: DashParams::default(),
            aopt: (objective == ObjectiveKind::Aopt).then(AOptParams::default),
            diversity: None,
            repetitions: 1,
            workers: 1,
            seed: 0,
        }
    }

    pub fn build_oracle(&self) -> Result<Oracle> {
        let source = self.source.load()?;
        make_oracle(self.objective, &source, self.aopt, self.diversity.clone())?.with_workers(self.workers)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub workers: usize,
    pub cores: usize,
    pub unix_time: u64,
}

impl Environment {
    pub fn capture(workers: usize) -> Self {
        Environment {
            workers,
            cores: std::thread::available_parallelism().map_or(1, |n| n.get()),
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub k: usize,
    pub repetition: usize,
    pub value: f64,
    pub adaptive_rounds: u64,
    pub queries: u64,
    pub wall_time_ms: f64,
    pub selected: IndexSet,
    /// `(round, f(S))` points, for accuracy-vs-rounds runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<(u64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub environment: Environment,
    pub results: Vec<ResultRow>,
    pub seed: u64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flattened table: one row per series point, or per result when there is no series.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::io("<report>", std::io::Error::other(e.to_string()));
        w.write_record([
            "algorithm", "k", "repetition", "round", "value", "adaptive_rounds", "queries",
            "wall_time_ms", "selected", "error",
        ])
        .map_err(io)?;
        for r in &self.results {
            let selected = r.selected.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
            let points = match &r.series {
                Some(s) if !s.is_empty() => s.clone(),
                _ => vec![(r.adaptive_rounds, r.value)],
            };
            for (round, value) in points {
                w.write_record([
                    r.algorithm.as_str().to_string(),
                    r.k.to_string(),
                    r.repetition.to_string(),
                    round.to_string(),
                    value.to_string(),
                    r.adaptive_rounds.to_string(),
                    r.queries.to_string(),
                    format!("{:.3}", r.wall_time_ms),
                    selected.clone(),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::io("<report>", std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path, csv: bool) -> Result<()> {
        let text = if csv { self.to_csv()? } else { self.to_json()? };
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Runs one algorithm at budget `k`.
pub fn run_algorithm(
    oracle: &Oracle,
    algorithm: Algorithm,
    k: usize,
    dash: &DashParams,
    workers: usize,
    seed: u64,
) -> Result<SelectionResult> {
    match algorithm {
        Algorithm::Dash => {
            let mut p = dash.clone();
            p.k = k;
            p.seed = seed;
            dash_with_guessing(oracle, &p)
        }
        Algorithm::Greedy => greedy_sds_ma(oracle, k),
        Algorithm::GreedyParallel => greedy_parallel(oracle, k, workers),
        Algorithm::TopK => top_k(oracle, k),
        Algorithm::Random => random_k(oracle, k, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

fn row(algorithm: Algorithm, k: usize, repetition: usize, res: Result<SelectionResult>, series: bool) -> ResultRow {
    match res {
        Ok(r) => ResultRow {
            algorithm,
            k,
            repetition,
            value: r.value,
            adaptive_rounds: r.trace.adaptive_rounds,
            queries: r.trace.total_queries,
            wall_time_ms: r.trace.wall_time_ms,
            series: series.then(|| r.trace.value_series(r.value)),
            selected: r.selected,
            error: None,
        },
        Err(e) => {
            warn!("{algorithm} at k = {k} failed: {e}");
            ResultRow {
                algorithm,
                k,
                repetition,
                value: f64::NAN,
                adaptive_rounds: 0,
                queries: 0,
                wall_time_ms: 0.0,
                selected: IndexSet::empty(),
                series: None,
                error: Some(e.to_string()),
            }
        }
    }
}

fn check_ks(config: &ExperimentConfig, n: usize) -> Result<()> {
    if let Some(&k) = config.ks.iter().find(|&&k| k > n) {
        return Err(Error::Size(format!("k = {k} exceeds the {n} candidates")));
    }
    Ok(())
}

/// One run per algorithm at a single `k`, recording `f(S)` after every round.
pub fn run_accuracy_vs_rounds(config: &ExperimentConfig) -> Result<Report> {
    let &[k] = config.ks.as_slice() else {
        return Err(Error::config("accuracy vs rounds takes exactly one k"));
    };
    let oracle = config.build_oracle()?;
    check_ks(config, oracle.ground_size())?;
    let mut results = Vec::new();
    for rep in 0..config.repetitions.max(1) {
        let seed = config.seed.wrapping_add(rep as u64);
        for &alg in &config.algorithms {
            let res = run_algorithm(&oracle, alg, k, &config.dash, config.workers, seed);
            results.push(row(alg, k, rep, res, true));
        }
    }
    Ok(Report {
        experiment: "accuracy_vs_rounds".to_string(),
        config: config.clone(),
        environment: Environment::capture(config.workers),
        results,
        seed: config.seed,
        notes: Vec::new(),
    })
}

/// Independent runs per `k` per algorithm: terminal value, rounds and wall time.
pub fn run_accuracy_time_vs_k(config: &ExperimentConfig) -> Result<Report> {
    if config.ks.is_empty() {
        return Err(Error::config("accuracy vs k needs at least one k"));
    }
    let oracle = config.build_oracle()?;
    check_ks(config, oracle.ground_size())?;
    let mut results = Vec::new();
    for rep in 0..config.repetitions.max(1) {
        let seed = config.seed.wrapping_add(rep as u64);
        for &k in &config.ks {
            for &alg in &config.algorithms {
                let res = run_algorithm(&oracle, alg, k, &config.dash, config.workers, seed);
                results.push(row(alg, k, rep, res, false));
            }
        }
    }
    Ok(Report {
        experiment: "accuracy_time_vs_k".to_string(),
        config: config.clone(),
        environment: Environment::capture(config.workers),
        results,
        seed: config.seed,
        notes: vec![
            "each k is an independent run; randomized algorithms need not be monotone in k".to_string(),
        ],
    })
}

/// Re-evaluates every reported set on a fresh oracle; returns the largest discrepancy.
pub fn revalidate(report: &Report, data: &ObjectiveSource) -> Result<f64> {
    let c = &report.config;
    let oracle = make_oracle(c.objective, data, c.aopt, c.diversity.clone())?;
    let mut worst: f64 = 0.0;
    for r in report.results.iter().filter(|r| r.error.is_none()) {
        let v = oracle.eval_report(&r.selected)?;
        worst = worst.max((v - r.value).abs());
    }
    Ok(worst)
}
