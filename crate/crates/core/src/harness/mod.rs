//! Synthetic data, CSV ingestion, experiment runners and the CLI.

pub mod cli;
mod csv_io;
mod experiments;
mod generate;

pub use csv_io::{load_csv, write_csv, LoadSummary};
pub use experiments::{
    revalidate, run_accuracy_time_vs_k, run_accuracy_vs_rounds, run_algorithm, Algorithm,
    DataSource, Environment, ExperimentConfig, Report, ResultRow,
};
pub use generate::{
    generate_classification, generate_classification_with, generate_design, generate_regression,
    generate_regression_with, GroundTruth, SyntheticSpec, NOISE_SD,
};
