//! Seeded experiments, configuration files and CSV reports.

mod config;
mod experiment;
mod report;

pub use config::{parse_config, read_config, Algorithm, BetaSetting, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, run_experiment_with, world_seed};
pub use report::{emit_csv, write_timing_csv, MetricsReport, PathRecord, RegretRecord, RunSummary};
