//! Experiment configuration: a single JSON document per run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use scoresmooth_core::denoise::NoiseSchedule;
use scoresmooth_core::nnscore::{make_circle_set, make_nonuniform_set, TimeSampling, TrainConfig};
use scoresmooth_core::scorefield::{SmoothingParams, TrainingSet};
use scoresmooth_core::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ScoreEval,
    DenoiseCompare,
    #[serde(rename = "verify-propositions", alias = "verify")]
    Verify,
    #[serde(rename = "train-1d")]
    Train1d,
    #[serde(rename = "train-2d")]
    Train2d,
    Circle,
    Nonuniform,
    Sweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::ScoreEval,
        Self::DenoiseCompare,
        Self::Verify,
        Self::Train1d,
        Self::Train2d,
        Self::Circle,
        Self::Nonuniform,
        Self::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ScoreEval => "score-eval",
            Self::DenoiseCompare => "denoise-compare",
            Self::Verify => "verify",
            Self::Train1d => "train-1d",
            Self::Train2d => "train-2d",
            Self::Circle => "circle",
            Self::Nonuniform => "nonuniform",
            Self::Sweep => "sweep",
        }
    }
}

/// Where the anchors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TrainingSetSpec {
    /// `n` equally spaced anchors on `[−half_width, half_width]` along the first axis of ℝ^dim.
    Uniform {
        n: usize,
        half_width: f64,
        dim: usize,
    },
    /// The uniform grid on `[−1, 1]` with each point moved by up to `jitter`.
    Jittered { n: usize, jitter: f64 },
    /// `n` equally spaced points on a circle in the plane.
    Circle { n: usize, radius: f64 },
}

impl TrainingSetSpec {
    /// The one-dimensional training set; circles have none.
    pub fn line(&self, seed: u64) -> anyhow::Result<Option<TrainingSet>> {
        Ok(match *self {
            Self::Uniform { n, half_width, dim } => Some(TrainingSet::uniform(n, half_width, dim)?),
            Self::Jittered { n, jitter } => Some(make_nonuniform_set(n, jitter, seed)?),
            Self::Circle { .. } => None,
        })
    }

    pub fn anchors(&self, seed: u64) -> anyhow::Result<PointCloud> {
        match *self {
            Self::Circle { n, radius } => Ok(make_circle_set(n, radius)?),
            _ => Ok(self
                .line(seed)?
                .expect("line layouts have a training set")
                .anchors()),
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Uniform { n, .. } | Self::Jittered { n, .. } | Self::Circle { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingSpec {
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub t0: f64,
    pub t_min: f64,
    pub steps: usize,
    pub rho: f64,
}

impl ScheduleSpec {
    pub fn build(&self) -> anyhow::Result<NoiseSchedule> {
        Ok(NoiseSchedule::new(
            self.t0, self.t_min, self.steps, self.rho,
        )?)
    }
}

/// Network and optimizer settings.
///
/// `time` is the noise level of fixed-time models; time-conditioned models
/// sample `t` with `t^{1/3}` uniform on `[t_lo^{1/3}, t0^{1/3}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NnSpec {
    pub hidden: usize,
    pub embed: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub weight_decay: f64,
    pub decay_groups: Vec<String>,
    pub time: f64,
    pub t_lo: f64,
    pub lambdas: Vec<f64>,
    pub seeds: usize,
}

impl NnSpec {
    pub fn fixed_time(&self, weight_decay: f64, seed: u64) -> TrainConfig {
        self.train_config(weight_decay, seed, TimeSampling::Fixed { t: self.time })
    }

    pub fn time_conditioned(&self, t0: f64, seed: u64) -> TrainConfig {
        let sampling = TimeSampling::CubeRootUniform {
            t_lo: self.t_lo,
            t_hi: t0,
        };
        self.train_config(self.weight_decay, seed, sampling)
    }

    fn train_config(
        &self,
        weight_decay: f64,
        seed: u64,
        time_sampling: TimeSampling,
    ) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            steps: self.steps,
            weight_decay,
            decay_groups: self.decay_groups.clone(),
            seed,
            time_sampling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub training_set: TrainingSetSpec,
    pub smoothing: SmoothingSpec,
    pub schedule: ScheduleSpec,
    pub nn: NnSpec,
    /// Number of denoising trajectories.
    pub samples: usize,
    /// Overrides the output root for this run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn uniform(n: usize, dim: usize) -> TrainingSetSpec {
    TrainingSetSpec::Uniform {
        n,
        half_width: 1.0,
        dim,
    }
}

const SCHEDULE: ScheduleSpec = ScheduleSpec {
    t0: 0.02,
    t_min: 1e-5,
    steps: 200,
    rho: 2.0,
};

fn fixed_t_nn(time: f64, learning_rate: f64, steps: usize) -> NnSpec {
    NnSpec {
        hidden: 256,
        embed: 16,
        learning_rate,
        batch_size: 1024,
        steps,
        weight_decay: 3.0,
        decay_groups: vec!["hidden".into(), "out".into()],
        time,
        t_lo: 1e-6,
        lambdas: vec![1.0, 3.0, 5.0, 7.0],
        seeds: 3,
    }
}

fn conditioned_nn() -> NnSpec {
    NnSpec {
        hidden: 128,
        embed: 16,
        learning_rate: 5e-5,
        batch_size: 1024,
        steps: 20_000,
        weight_decay: 3.0,
        decay_groups: vec!["body".into()],
        time: 0.05,
        t_lo: 1e-6,
        lambdas: vec![],
        seeds: 1,
    }
}

impl ExperimentConfig {
    /// The desk-scale default of each experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let base = |training_set, nn, samples| Self {
            kind,
            seed: 0,
            training_set,
            smoothing: SmoothingSpec { kappa: 1.2 },
            schedule: SCHEDULE,
            nn,
            samples,
            output_dir: None,
        };
        match kind {
            ExperimentKind::ScoreEval | ExperimentKind::Sweep => {
                base(uniform(2, 1), fixed_t_nn(0.05, 2e-4, 6000), 0)
            }
            ExperimentKind::Train1d => base(uniform(2, 1), fixed_t_nn(0.05, 2e-4, 6000), 0),
            ExperimentKind::Verify => {
                let mut c = base(uniform(2, 1), fixed_t_nn(0.05, 2e-4, 6000), 1000);
                c.smoothing.kappa = 1.0;
                c
            }
            ExperimentKind::DenoiseCompare | ExperimentKind::Train2d => {
                base(uniform(4, 2), conditioned_nn(), 200_000)
            }
            ExperimentKind::Circle => {
                let mut nn = conditioned_nn();
                nn.learning_rate = 1e-4;
                nn.batch_size = 256;
                nn.weight_decay = 0.0;
                nn.decay_groups = vec![];
                let mut c = base(TrainingSetSpec::Circle { n: 8, radius: 1.0 }, nn, 20_000);
                c.schedule.t0 = 0.08;
                c
            }
            ExperimentKind::Nonuniform => {
                let mut nn = fixed_t_nn(0.1, 5e-5, 15_000);
                nn.lambdas = vec![0.0, 1.0, 3.0, 5.0];
                nn.seeds = 1;
                base(TrainingSetSpec::Jittered { n: 6, jitter: 0.08 }, nn, 0)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; `default` names the preset of `kind`.
    pub fn load(path: &str, kind: ExperimentKind) -> Result<Self, ConfigError> {
        if path == "default" {
            return Ok(Self::preset(kind));
        }
        let text = std::fs::read_to_string(Path::new(path)).map_err(|e| ConfigError::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configs always serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |field: &str, reason: &str| {
            Err(ConfigError::Invalid {
                field: field.to_string(),
                reason: reason.to_string(),
            })
        };
        match self.training_set {
            TrainingSetSpec::Uniform { n, half_width, dim } => {
                if n < 2 {
                    return bad("training_set.n", "need at least two anchors");
                }
                if !(half_width > 0.0 && half_width.is_finite()) {
                    return bad("training_set.half_width", "must be positive");
                }
                if dim == 0 {
                    return bad("training_set.dim", "must be at least 1");
                }
            }
            TrainingSetSpec::Jittered { n, jitter } => {
                if n < 2 {
                    return bad("training_set.n", "need at least two anchors");
                }
                if !(jitter >= 0.0 && jitter < 1.0 / (n - 1) as f64) {
                    return bad("training_set.jitter", "must be below half the grid gap");
                }
            }
            TrainingSetSpec::Circle { n, radius } => {
                if n < 3 {
                    return bad("training_set.n", "a circle needs at least three points");
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return bad("training_set.radius", "must be positive");
                }
            }
        }
        if SmoothingParams::new(self.smoothing.kappa).is_err() {
            return bad("smoothing.kappa", "must be positive and finite");
        }
        if let Err(e) = self.schedule.build() {
            return bad("schedule", &e.to_string());
        }
        let nn = &self.nn;
        if nn.hidden == 0 || nn.embed == 0 {
            return bad("nn.hidden", "widths must be positive");
        }
        if !(nn.learning_rate > 0.0 && nn.learning_rate.is_finite()) {
            return bad("nn.learning_rate", "must be positive");
        }
        if nn.batch_size == 0 {
            return bad("nn.batch_size", "must be positive");
        }
        if !(nn.weight_decay >= 0.0) || nn.lambdas.iter().any(|l| !(*l >= 0.0)) {
            return bad("nn.weight_decay", "decay coefficients must be non-negative");
        }
        if !(nn.time > 0.0 && nn.t_lo > 0.0 && nn.t_lo < self.schedule.t0) {
            return bad(
                "nn.t_lo",
                "need 0 < t_lo < schedule.t0 and a positive nn.time",
            );
        }
        if nn.seeds == 0 {
            return bad("nn.seeds", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("config line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::preset(kind);
            c.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::preset(ExperimentKind::Sweep);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn missing_field_is_named() {
        let mut v: serde_json::Value =
            serde_json::from_str(&ExperimentConfig::preset(ExperimentKind::Verify).to_json())
                .unwrap();
        v["schedule"].as_object_mut().unwrap().remove("rho");
        let err = ExperimentConfig::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut c = ExperimentConfig::preset(ExperimentKind::Nonuniform);
        c.training_set = TrainingSetSpec::Jittered { n: 6, jitter: 0.5 };
        let err = ExperimentConfig::from_json(&c.to_json()).unwrap_err();
        assert!(err.to_string().contains("training_set.jitter"), "{err}");
    }
}
