//! Command-line laboratory for the score-smoothing core: experiment configs,
//! run directories with CSV/JSON outputs, model checkpoints and the
//! acceptance checks.

pub mod checkpoint;
pub mod checks;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run, RunOptions, RunSummary};
