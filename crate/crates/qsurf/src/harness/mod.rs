//! Experiment orchestration: configuration, the full two-stage pipeline and
//! the CLI.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod report;
pub mod runner;

pub use config::{default_levels, ExperimentConfig};
pub use report::{CrpsRow, EvaluationReport, ModelReport};
pub use runner::{
    evaluate, fit_models, generate_datasets, run_experiment, Dataset, TrainedModels,
    BASELINE_MODEL, CONDITIONAL_MODEL, QSNN_MODEL,
};
