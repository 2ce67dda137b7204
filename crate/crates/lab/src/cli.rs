//! Argument parsing and exit codes: 0 success, 1 failed assertion or run
//! error, 2 usage or configuration error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind, TrainingSetSpec};
use crate::experiments::{self, RunOptions};
use crate::output::output_root;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scoresmooth", version, about = "Score smoothing experiments")]
pub struct Cli {
    /// Output root; defaults to $SCORESMOOTH_OUT, then ./out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file, or `default` for the built-in preset.
    #[arg(long, default_value = "default")]
    pub config: String,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score curves of every field variant on a grid, plus learned curves per λ.
    ScoreEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<f64>,
        /// Comma-separated weight decays; a bare `--lambdas` skips training.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        lambdas: Option<Vec<f64>>,
    },
    /// Denoising with the empirical, smoothed and learned scores.
    DenoiseCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Training steps of the learned field; 0 leaves it out.
        #[arg(long)]
        nn_steps: Option<usize>,
    },
    /// Closed-form checks; `--full` adds the sampling and training checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        full: bool,
    },
    /// One fixed-time model.
    #[command(name = "train-1d")]
    Train1d {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// One time-conditioned model.
    #[command(name = "train-2d")]
    Train2d {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Learned score on points of a circle, without weight decay.
    Circle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Fail unless samples stay near the circle and fill the arcs.
        #[arg(long)]
        assert: bool,
    },
    /// Learned scores on a jittered grid.
    Nonuniform {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Weight-decay grid against fitted smoothing width.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        /// Fail unless δ falls with λ and every model is closer to ŝ than to the ESF.
        #[arg(long)]
        assert: bool,
    },
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Self::ScoreEval { .. } => ExperimentKind::ScoreEval,
            Self::DenoiseCompare { .. } => ExperimentKind::DenoiseCompare,
            Self::Verify { .. } => ExperimentKind::Verify,
            Self::Train1d { .. } => ExperimentKind::Train1d,
            Self::Train2d { .. } => ExperimentKind::Train2d,
            Self::Circle { .. } => ExperimentKind::Circle,
            Self::Nonuniform { .. } => ExperimentKind::Nonuniform,
            Self::Sweep { .. } => ExperimentKind::Sweep,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Self::ScoreEval { common, .. }
            | Self::DenoiseCompare { common, .. }
            | Self::Verify { common, .. }
            | Self::Train1d { common, .. }
            | Self::Train2d { common, .. }
            | Self::Circle { common, .. }
            | Self::Nonuniform { common, .. }
            | Self::Sweep { common, .. } => common,
        }
    }

    /// Loads the config and applies the flag overrides.
    pub fn config(&self) -> Result<(ExperimentConfig, RunOptions), ConfigError> {
        let kind = self.kind();
        let common = self.common();
        let mut c = ExperimentConfig::load(&common.config, kind)?;
        if c.kind != kind {
            return Err(ConfigError::Invalid {
                field: "kind".into(),
                reason: format!("config is for `{}`, not `{}`", c.kind.name(), kind.name()),
            });
        }
        if let Some(seed) = common.seed {
            c.seed = seed;
        }
        let mut opts = RunOptions::default();
        match self {
            Self::ScoreEval { t, lambdas, .. } => {
                set(&mut c.nn.time, t);
                set(&mut c.nn.lambdas, lambdas);
            }
            Self::DenoiseCompare {
                n,
                d,
                t0,
                kappa,
                samples,
                nn_steps,
                ..
            } => {
                if let TrainingSetSpec::Uniform { n: cn, dim, .. } = &mut c.training_set {
                    set(cn, n);
                    set(dim, d);
                } else if n.is_some() || d.is_some() {
                    return Err(ConfigError::Invalid {
                        field: "training_set".into(),
                        reason: "--n and --d need the uniform layout".into(),
                    });
                }
                set(&mut c.schedule.t0, t0);
                set(&mut c.smoothing.kappa, kappa);
                set(&mut c.samples, samples);
                set(&mut c.nn.steps, nn_steps);
            }
            Self::Verify { full, .. } => opts.full = *full,
            Self::Train1d { lambda, steps, .. } => {
                set(&mut c.nn.weight_decay, lambda);
                set(&mut c.nn.steps, steps);
            }
            Self::Train2d { steps, .. } => set(&mut c.nn.steps, steps),
            Self::Circle {
                n,
                steps,
                samples,
                assert,
                ..
            } => {
                if let (TrainingSetSpec::Circle { n: cn, .. }, Some(v)) = (&mut c.training_set, n) {
                    *cn = *v;
                }
                set(&mut c.nn.steps, steps);
                set(&mut c.samples, samples);
                opts.assert = *assert;
            }
            Self::Nonuniform { lambdas, steps, .. } => {
                set(&mut c.nn.lambdas, lambdas);
                set(&mut c.nn.steps, steps);
            }
            Self::Sweep {
                lambdas,
                seeds,
                steps,
                assert,
                ..
            } => {
                set(&mut c.nn.lambdas, lambdas);
                set(&mut c.nn.seeds, seeds);
                set(&mut c.nn.steps, steps);
                opts.assert = *assert;
            }
        }
        c.validate()?;
        Ok((c, opts))
    }
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (config, opts) = match cli.command.config() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let root = output_root(cli.out.as_deref(), &config);
    match experiments::run(&config, &root, opts) {
        Ok(summary) if summary.failures.is_empty() => {
            println!("{}", summary.dir.display());
            EXIT_OK
        }
        Ok(summary) => {
            for f in &summary.failures {
                eprintln!("assertion failed: {f}");
            }
            let report = summary.report.unwrap_or(summary.dir);
            eprintln!("report: {}", report.display());
            EXIT_ASSERTION
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ASSERTION
        }
    }
}
