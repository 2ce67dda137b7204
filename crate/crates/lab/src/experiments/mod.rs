//! One runner per subcommand. Each writes a run directory and reports the
//! assertions it evaluated.

pub mod common;
mod denoise_compare;
mod scores;
mod training;
mod verify;

pub use denoise_compare::declared_files;

use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, ExperimentKind};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Evaluate the qualitative properties of `sweep` and `circle` as assertions.
    pub assert: bool,
    /// Make `verify` run every acceptance check, including the training ones.
    pub full: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    /// Failed assertions; empty on success.
    pub failures: Vec<String>,
    /// File holding the assertion details, if any were evaluated.
    pub report: Option<PathBuf>,
}

pub fn run(config: &ExperimentConfig, root: &Path, opts: RunOptions) -> anyhow::Result<RunSummary> {
    config.validate()?;
    match config.kind {
        ExperimentKind::ScoreEval => scores::score_eval(config, root),
        ExperimentKind::Sweep => scores::sweep(config, root, opts),
        ExperimentKind::Nonuniform => scores::nonuniform(config, root),
        ExperimentKind::DenoiseCompare => denoise_compare::run(config, root),
        ExperimentKind::Verify => verify::run(config, root, opts),
        ExperimentKind::Train1d => training::train_1d(config, root),
        ExperimentKind::Train2d => training::train_2d(config, root),
        ExperimentKind::Circle => training::circle(config, root, opts),
    }
}

/// Figure or table each experiment's data corresponds to.
pub fn figure(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::ScoreEval => {
            "Figure 2 (learned vs empirical scores at fixed t); Figures 4-6 (score curves)"
        }
        ExperimentKind::Sweep => "Figure 2 (weight decay vs fitted smoothing width)",
        ExperimentKind::Nonuniform => {
            "non-uniform 1-D figure (learned scores for several weight decays)"
        }
        ExperimentKind::DenoiseCompare => {
            "Figure 3 (denoising trajectories and tangent histograms)"
        }
        ExperimentKind::Verify => {
            "loss-limit table, optimality certificates, flow-map and KL checks"
        }
        ExperimentKind::Train1d => "Figure 2 (single fixed-t model)",
        ExperimentKind::Train2d => "Figure 3 column (iii) (time-conditioned model)",
        ExperimentKind::Circle => "circle figure (samples and learned field)",
    }
}

fn fmt_lambda(l: f64) -> String {
    format!("{l}")
}
