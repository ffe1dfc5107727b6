//! Experiment runner and report writer behind the `dynmatch` command.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{BenchConfig, ConfigError, OptPolicy};
pub use report::{Report, RunRecord, SummaryRow};
pub use runner::{run_experiment, BenchError, Cell};
