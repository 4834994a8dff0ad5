//! Config-driven sweeps, result files and the command-line front end.

pub mod cli;
pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, ExperimentConfig, MapSpec};
pub use sweep::{run_sweep, SummaryRow, SweepReport, RESULTS_HEADER, SUMMARY_HEADER};
