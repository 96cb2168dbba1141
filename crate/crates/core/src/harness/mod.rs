//! Experiment catalog, Monte Carlo driver and reporting.

pub mod config;
pub mod diagnostics;
pub mod metrics;
pub mod mimo;
pub mod report;
pub mod runner;

pub use config::{Algorithm, ExperimentConfig, ExperimentId, Family, SparsityRule};
pub use report::{emit_csv, emit_plotdata, read_csv, write_csv};
pub use runner::{grid, run_experiment, GridPoint, MetricsRow, RunOptions, TrialMetrics};
