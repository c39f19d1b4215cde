//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 data
//! error, 4 size guard exceeded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::csv_io::{load_csv, write_csv};
use super::experiments::{
    run_accuracy_time_vs_k, run_accuracy_vs_rounds, run_algorithm, Algorithm, DataSource,
    ExperimentConfig,
};
use super::generate::{
    generate_classification_with, generate_design, generate_regression_with, SyntheticSpec, NOISE_SD,
};
use crate::error::{Error, Result};
use crate::objectives::{
    make_oracle, AOptParams, Dataset, DiversityFunction, ObjectiveKind, ObjectiveSource,
};
use crate::solver::{DashParams, Guess, SelectionResult};
use crate::verify::{
    counterexample_suite, diff_submodularity_witness, sandwich_check, spectral_gamma,
    VerifyReport, SANDWICH_RTOL,
};

#[derive(Parser, Debug)]
#[command(name = "dashsel", version, about = "Low-adaptivity subset selection for statistical objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic dataset to CSV.
    Generate(GenerateArgs),
    /// Select a subset with one algorithm.
    Select(SelectArgs),
    /// Run an accuracy-vs-rounds or accuracy-vs-k experiment.
    Benchmark(BenchmarkArgs),
    /// Run a verification check.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Regression,
    Classification,
    Design,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Experiment {
    Rounds,
    KSweep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Counterexamples,
    Sandwich,
    Spectral,
    Ratios,
}

#[derive(Args, Debug, Clone)]
struct SyntheticArgs {
    /// Number of features (stimuli for design data).
    #[arg(long)]
    n: Option<usize>,
    /// Number of observations (dimension for design data).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    support: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Seed of the data generator.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
}

impl SyntheticArgs {
    fn spec(&self, kind: Kind) -> SyntheticSpec {
        let base = match kind {
            Kind::Classification => SyntheticSpec::classification(),
            _ => SyntheticSpec::regression(),
        };
        SyntheticSpec {
            n: self.n.unwrap_or(base.n),
            d: self.d.unwrap_or(base.d),
            support: self.support.unwrap_or(base.support),
            rho: self.rho.unwrap_or(base.rho),
            noise_sd: NOISE_SD,
            seed: self.data_seed,
        }
    }

    fn design(&self) -> (usize, usize, f64) {
        (self.n.unwrap_or(1024), self.d.unwrap_or(256), self.rho.unwrap_or(0.8))
    }

    fn source(&self, kind: Kind) -> DataSource {
        match kind {
            Kind::Regression => DataSource::Regression(self.spec(kind)),
            Kind::Classification => DataSource::Classification(self.spec(kind)),
            Kind::Design => {
                let (n, d, rho) = self.design();
                DataSource::Design {
                    n,
                    d,
                    rho,
                    seed: self.data_seed,
                }
            }
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    synthetic: SyntheticArgs,
    /// Features CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Response CSV to write.
    #[arg(long)]
    response: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    #[arg(long, value_parser = parse_objective)]
    objective: ObjectiveKind,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    response: Option<PathBuf>,
    /// R² covariance model JSON ({"b": [...], "C": [[...], ...]}).
    #[arg(long)]
    covariance: Option<PathBuf>,
    /// Generate synthetic data instead of reading CSV.
    #[arg(long, value_enum)]
    generate: Option<Kind>,
    #[command(flatten)]
    synthetic: SyntheticArgs,
    /// Diversity groups JSON ({"groups": [[...]], "weights": [...]}).
    #[arg(long)]
    diversity: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl DataArgs {
    fn data_source(&self) -> Result<DataSource> {
        let needs_response = matches!(self.objective, ObjectiveKind::Reg | ObjectiveKind::Class | ObjectiveKind::R2);
        match (&self.covariance, &self.generate, &self.features) {
            (Some(path), None, None) => Ok(DataSource::Covariance { path: path.clone() }),
            (None, Some(kind), None) => Ok(self.synthetic.source(*kind)),
            (None, None, Some(features)) => {
                if needs_response && self.response.is_none() {
                    return Err(Error::data(format!(
                        "--response is required for the {} objective",
                        self.objective
                    )));
                }
                Ok(DataSource::Csv {
                    features: features.clone(),
                    response: self.response.clone(),
                })
            }
            (None, None, None) => Err(Error::data(
                "no data: pass --features (with --response), --covariance or --generate",
            )),
            _ => Err(Error::config(
                "--features, --covariance and --generate are mutually exclusive",
            )),
        }
    }

    fn aopt(&self) -> Result<Option<AOptParams>> {
        match self.objective {
            ObjectiveKind::Aopt => Ok(Some(AOptParams::new(self.beta, self.sigma)?)),
            _ => Ok(None),
        }
    }

    fn diversity(&self) -> Result<Option<DiversityFunction>> {
        self.diversity
            .as_ref()
            .map(|p| DiversityFunction::from_json(&read(p)?))
            .transpose()
    }
}

#[derive(Args, Debug)]
struct DashArgs {
    #[arg(long, default_value_t = 5)]
    r: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Differential-submodularity parameter, or "auto" for the guess grid.
    #[arg(long, default_value = "auto", value_parser = parse_guess)]
    alpha: Guess,
    /// Optimal value, or "auto" for the guess grid.
    #[arg(long, default_value = "auto", value_parser = parse_guess)]
    opt: Guess,
    /// Samples per expectation estimate.
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long)]
    filter_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DashArgs {
    fn params(&self, k: usize) -> Result<DashParams> {
        let p = DashParams {
            k,
            r: self.r,
            epsilon: self.epsilon,
            alpha: self.alpha,
            samples_m: self.samples,
            opt_guess: self.opt,
            filter_cap: self.filter_cap,
            seed: self.seed,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "dash", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    dash: DashArgs,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = Experiment::Rounds)]
    experiment: Experiment,
    /// Budget(s); a comma-separated list for the k sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "dash,greedy,top_k,random", value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[command(flatten)]
    dash: DashArgs,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: Check,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    response: Option<PathBuf>,
    #[command(flatten)]
    synthetic: SyntheticArgs,
    /// Trials (sandwich) or sampled pairs (ratios).
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Largest |S| and |A| sampled by the ratio probe.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_objective(s: &str) -> std::result::Result<ObjectiveKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_guess(s: &str) -> std::result::Result<Guess, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p.display().to_string(), e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Select(a) => select(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Verify(a) => verify(a),
    }
}

fn generate(a: GenerateArgs) -> Result<i32> {
    let data = match a.kind {
        Kind::Regression => generate_regression_with(&a.synthetic.spec(a.kind))?.0,
        Kind::Classification => generate_classification_with(&a.synthetic.spec(a.kind), None)?.0,
        Kind::Design => {
            let (n, d, rho) = a.synthetic.design();
            generate_design(n, d, rho, a.synthetic.data_seed)?
        }
    };
    write_csv(&data, &a.out, a.response.as_deref())?;
    eprintln!(
        "wrote {} observations of {} features to {}",
        data.rows(),
        data.cols(),
        a.out.display()
    );
    Ok(0)
}

fn select(a: SelectArgs) -> Result<i32> {
    let source = a.data.data_source()?.load()?;
    let oracle = make_oracle(a.data.objective, &source, a.data.aopt()?, a.data.diversity()?)?
        .with_workers(a.workers)?;
    let params = a.dash.params(a.k)?;
    let result: SelectionResult = run_algorithm(&oracle, a.algorithm, a.k, &params, a.workers, a.dash.seed)?;
    let text = match a.format {
        Format::Json => json(&result)?,
        Format::Csv => {
            let selected: Vec<String> = result.selected.iter().map(|i| i.to_string()).collect();
            format!(
                "algorithm,k,value,adaptive_rounds,queries,wall_time_ms,selected\n{},{},{},{},{},{:.3},{}",
                result.algorithm,
                a.k,
                result.value,
                result.trace.adaptive_rounds,
                result.trace.total_queries,
                result.trace.wall_time_ms,
                selected.join(" ")
            )
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(0)
}

fn benchmark(a: BenchmarkArgs) -> Result<i32> {
    let source = a.data.data_source()?;
    let mut config = ExperimentConfig::new(a.data.objective, source);
    config.algorithms = a.algorithms.clone();
    config.ks = a.k.clone();
    config.dash = a.dash.params(a.k.iter().copied().max().unwrap_or(0))?;
    config.aopt = a.data.aopt()?;
    config.diversity = a.data.diversity()?;
    config.repetitions = a.repetitions;
    config.workers = a.workers;
    config.seed = a.dash.seed;
    let report = match a.experiment {
        Experiment::Rounds => run_accuracy_vs_rounds(&config)?,
        Experiment::KSweep => run_accuracy_time_vs_k(&config)?,
    };
    let text = match a.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(&text, a.out.as_deref())?;
    Ok(0)
}

fn verify_dataset(a: &VerifyArgs) -> Result<Dataset> {
    match &a.features {
        Some(f) => Ok(load_csv(f, a.response.as_deref())?.0),
        None => {
            let mut spec = a.synthetic.spec(Kind::Regression);
            spec.n = a.synthetic.n.unwrap_or(8);
            spec.d = a.synthetic.d.unwrap_or(200);
            spec.support = a.synthetic.support.unwrap_or(spec.n.min(4));
            Ok(generate_regression_with(&spec)?.0)
        }
    }
}

fn verify(a: VerifyArgs) -> Result<i32> {
    let report = match a.check {
        Check::Counterexamples => counterexample_suite()?,
        Check::Sandwich => {
            let data = verify_dataset(&a)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let s = sandwich_check(&data, a.trials, &mut rng)?;
            let mut rep = VerifyReport::new("sandwich");
            rep.tolerances.insert("relative".into(), SANDWICH_RTOL);
            rep.instances = s.trials;
            rep.violations = s.violations;
            rep.witnesses.push(serde_json::to_value(&s)?);
            rep
        }
        Check::Spectral => {
            let data = verify_dataset(&a)?;
            let b = spectral_gamma(&data)?;
            let mut rep = VerifyReport::new("spectral");
            rep.record("alpha = gamma^2", b.alpha == b.gamma * b.gamma, serde_json::to_value(b)?, serde_json::json!({"gamma": "[0, 1]"}));
            rep
        }
        Check::Ratios => {
            let data = verify_dataset(&a)?;
            let oracle = make_oracle(ObjectiveKind::Reg, &ObjectiveSource::Data(data.clone()), None, None)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let r = diff_submodularity_witness(&oracle, a.trials.max(1), a.k, &mut rng)?;
            let b = spectral_gamma(&data)?;
            let mut rep = VerifyReport::new("ratios");
            rep.tolerances.insert("relative".into(), SANDWICH_RTOL);
            let inside = r.r_lo >= b.gamma * (1.0 - SANDWICH_RTOL) - SANDWICH_RTOL
                && r.r_hi * b.gamma <= 1.0 + SANDWICH_RTOL;
            rep.record(
                "sampled ratios inside the spectral sandwich",
                inside,
                serde_json::to_value(&r)?,
                serde_json::json!({"gamma": b.gamma}),
            );
            rep
        }
    };
    emit(&json(&report)?, a.out.as_deref())?;
    Ok(if report.passed() { 0 } else { 1 })
}
