//! Experiment harness: configuration, Monte Carlo runs and report output.

pub mod config;
pub mod experiment;
pub mod report;
pub mod stats;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, run_oracle_check, RiskReport, SCHEMA_VERSION};
pub use stats::{fit_rate_slope, MeanVar};
