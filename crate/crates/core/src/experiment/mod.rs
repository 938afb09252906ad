//! Named experiments, their configuration and their reports.

pub mod config;
pub mod report;
pub mod runner;
pub mod scan;

pub use config::{parse_config, ConfigEntries, ConfigError, Experiment, ExperimentConfig, Format};
pub use report::{emit_report, render, Criterion, EmitError, ExperimentReport, CSV_HEADER};
pub use runner::run_experiment;
