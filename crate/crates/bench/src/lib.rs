//! Experiment runner, dataset ingestion, bootstrap and table emission for
//! `frechet-sdr`.

pub mod bootstrap;
pub mod config;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod tables;

pub use config::{Block, ExperimentConfig};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, run_experiment_with_threads, CellResult, ExperimentResult};
