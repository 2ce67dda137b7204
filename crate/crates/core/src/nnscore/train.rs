use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::adamw::AdamW;
use super::mlp::{Architecture, MlpScoreModel, TrainBatch};
use crate::error::{check_time, Error, Result};
use crate::rng::{derive_seed, seeded, standard_normal, ChaCha8Rng, Rng};
use crate::scorefield::esf_points;
use crate::PointCloud;

/// Training aborts once the batch loss exceeds this.
pub const DIVERGENCE_LOSS: f64 = 1e6;

/// How the noise level of each training sample is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", rename_all = "kebab-case"))]
pub enum TimeSampling {
    Fixed {
        t: f64,
    },
    /// `t^{1/3}` uniform on `[t_lo^{1/3}, t_hi^{1/3}]`.
    CubeRootUniform {
        t_lo: f64,
        t_hi: f64,
    },
}

impl TimeSampling {
    fn validate(&self) -> Result<()> {
        match *self {
            TimeSampling::Fixed { t } => check_time(t),
            TimeSampling::CubeRootUniform { t_lo, t_hi } => {
                check_time(t_lo)?;
                if t_hi > t_lo && t_hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("time_sampling", "need t_lo < t_hi"))
                }
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            TimeSampling::Fixed { t } => t,
            TimeSampling::CubeRootUniform { t_lo, t_hi } => {
                let u = rng.random_range(t_lo.cbrt()..=t_hi.cbrt());
                u * u * u
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub weight_decay: f64,
    /// Group-name prefixes that receive weight decay (`"body"` matches `body.in.weight`, …).
    pub decay_groups: Vec<String>,
    pub seed: u64,
    pub time_sampling: TimeSampling,
}

impl TrainConfig {
    pub fn validate(&self, arch: &Architecture) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("learning_rate", "must be non-negative"));
        }
        if self.batch_size == 0 || self.steps == 0 {
            return Err(Error::param(
                "batch_size",
                "batch size and step count must be positive",
            ));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::param("weight_decay", "must be non-negative"));
        }
        self.time_sampling.validate()?;
        if arch.is_time_conditioned() == matches!(self.time_sampling, TimeSampling::Fixed { .. }) {
            return Err(Error::param(
                "time_sampling",
                "fixed-time models need a fixed time and conditioned models a time range",
            ));
        }
        let groups = arch.groups();
        for prefix in &self.decay_groups {
            if !groups.iter().any(|g| group_matches(g.name, prefix)) {
                return Err(Error::param(
                    "decay_groups",
                    alloc::format!("`{prefix}` names no parameter group"),
                ));
            }
        }
        Ok(())
    }

    /// Per-parameter decay flags.
    pub fn decay_mask(&self, arch: &Architecture) -> Vec<bool> {
        let mut mask = alloc::vec![false; arch.param_count()];
        for g in arch.groups() {
            if self.decay_groups.iter().any(|p| group_matches(g.name, p)) {
                mask[g.offset..g.offset + g.len]
                    .iter_mut()
                    .for_each(|m| *m = true);
            }
        }
        mask
    }
}

fn group_matches(name: &str, prefix: &str) -> bool {
    name == prefix || (name.starts_with(prefix) && name.as_bytes().get(prefix.len()) == Some(&b'.'))
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MlpScoreModel,
    /// Batch loss before every update.
    pub losses: Vec<f64>,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().unwrap_or(&f64::NAN)
    }

    /// Mean of the batch losses over `range`.
    pub fn mean_loss(&self, range: core::ops::Range<usize>) -> f64 {
        let s = &self.losses[range];
        s.iter().sum::<f64>() / s.len() as f64
    }
}

/// Fresh batch from the noised empirical distribution of `anchors` with
/// the empirical score as target.
pub fn draw_batch(
    anchors: &PointCloud,
    sampling: &TimeSampling,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
    batch: &mut TrainBatch,
) -> Result<()> {
    let d = anchors.dim();
    batch.xs.resize(batch_size * d, 0.0);
    batch.targets.resize(batch_size * d, 0.0);
    batch.ts.resize(batch_size, 0.0);
    for j in 0..batch_size {
        let t = sampling.draw(rng);
        let k = rng.random_range(0..anchors.len());
        let sd = t.sqrt();
        let x = &mut batch.xs[j * d..(j + 1) * d];
        for (xi, yi) in x.iter_mut().zip(anchors.point(k)) {
            *xi = yi + sd * standard_normal(rng);
        }
        batch.ts[j] = t;
        esf_points(
            &batch.xs[j * d..(j + 1) * d],
            t,
            anchors,
            &mut batch.targets[j * d..(j + 1) * d],
        )?;
    }
    Ok(())
}

/// Minimizes the Monte-Carlo score-matching loss over fresh batches, starting from `model`.
///
/// Initialization and batch streams derive from `config.seed`, so identical
/// inputs give bit-identical results.
pub fn train_with(
    model: MlpScoreModel,
    anchors: &PointCloud,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let arch = model.architecture();
    config.validate(&arch)?;
    if anchors.dim() != arch.dim() || anchors.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: arch.dim(),
            found: anchors.dim(),
        });
    }
    let mut model = model;
    let mask = config.decay_mask(&arch);
    let mut opt = AdamW::new(model.param_count());
    let mut rng = seeded(derive_seed(config.seed, 1));
    let mut batch = TrainBatch::default();
    let mut grad = alloc::vec![0.0; model.param_count()];
    let mut losses = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        draw_batch(
            anchors,
            &config.time_sampling,
            config.batch_size,
            &mut rng,
            &mut batch,
        )?;
        let loss = model.batch_loss_grad(&batch, &mut grad)?;
        if !(loss <= DIVERGENCE_LOSS) {
            return Err(Error::Diverged { step, loss });
        }
        losses.push(loss);
        opt.step(
            model.params_mut(),
            &grad,
            config.learning_rate,
            config.weight_decay,
            &mask,
        )
        .map_err(|e| match e {
            Error::NonFiniteGradient { index, .. } => Error::NonFiniteGradient { step, index },
            other => other,
        })?;
    }
    Ok(TrainOutcome { model, losses })
}

fn init_model(arch: Architecture, seed: u64) -> Result<MlpScoreModel> {
    MlpScoreModel::init(arch, derive_seed(seed, 0))
}

/// Trains a fixed-time model at the time given by `config.time_sampling`.
///
/// The network output is multiplied by `1/t`, so the raw network predicts a displacement
/// `x̂ − x` of unit order rather than the score itself.
pub fn train_fixed_t(
    anchors: &PointCloud,
    hidden: usize,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let TimeSampling::Fixed { t } = config.time_sampling else {
        return Err(Error::param(
            "time_sampling",
            "fixed-time training needs a fixed t",
        ));
    };
    check_time(t)?;
    let arch = Architecture::FixedTime {
        dim: anchors.dim(),
        hidden,
    };
    let model = init_model(arch, config.seed)?.with_output_scale(1.0 / t)?;
    train_with(model, anchors, config)
}

/// Trains a time-conditioned model with per-sample times from `config.time_sampling`.
pub fn train_time_conditioned(
    anchors: &PointCloud,
    arch: Architecture,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if !arch.is_time_conditioned() || arch.dim() != anchors.dim() {
        return Err(Error::param(
            "architecture",
            "needs a time-conditioned model of the anchor dimension",
        ));
    }
    train_with(init_model(arch, config.seed)?, anchors, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorefield::TrainingSet;

    fn cfg(steps: usize, decay: &[&str], sampling: TimeSampling) -> TrainConfig {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 64,
            steps,
            weight_decay: 1.0,
            decay_groups: decay.iter().map(|s| String::from(*s)).collect(),
            seed: 42,
            time_sampling: sampling,
        }
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let anchors = TrainingSet::uniform(2, 1.0, 1).unwrap().anchors();
        let c = cfg(100, &["hidden", "out"], TimeSampling::Fixed { t: 0.05 });
        let a = train_fixed_t(&anchors, 32, &c).unwrap();
        let b = train_fixed_t(&anchors, 32, &c).unwrap();
        assert_eq!(a.model.params(), b.model.params());
        assert_eq!(a.losses, b.losses);
    }

    #[test]
    fn decay_mask_only_touches_named_groups() {
        let arch = Architecture::TimeConditioned {
            dim: 2,
            hidden: 8,
            embed: 3,
        };
        let model = MlpScoreModel::init(arch, 1).unwrap();
        let before = model.params().to_vec();
        let mut c = cfg(
            3,
            &["body"],
            TimeSampling::CubeRootUniform {
                t_lo: 1e-6,
                t_hi: 0.02,
            },
        );
        c.learning_rate = 0.0;
        let anchors = TrainingSet::uniform(2, 1.0, 2).unwrap().anchors();
        let out = train_with(model, &anchors, &c).unwrap();
        // learning rate 0 leaves everything untouched, decay included
        assert_eq!(out.model.params(), &before[..]);

        let mask = c.decay_mask(&arch);
        for g in arch.groups() {
            let decays = mask[g.offset];
            assert_eq!(decays, g.name.starts_with("body."), "{}", g.name);
            assert!(mask[g.offset..g.offset + g.len]
                .iter()
                .all(|m| *m == decays));
        }
    }

    #[test]
    fn config_validation() {
        let arch = Architecture::fixed_time(1);
        let good = cfg(1, &["hidden"], TimeSampling::Fixed { t: 0.05 });
        assert!(good.validate(&arch).is_ok());
        assert!(cfg(1, &["hid"], TimeSampling::Fixed { t: 0.05 })
            .validate(&arch)
            .is_err());
        assert!(cfg(
            1,
            &[],
            TimeSampling::CubeRootUniform {
                t_lo: 1e-6,
                t_hi: 0.02
            }
        )
        .validate(&arch)
        .is_err());
        let mut bad = good.clone();
        bad.batch_size = 0;
        assert!(bad.validate(&arch).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let anchors = TrainingSet::uniform(2, 1.0, 1).unwrap().anchors();
        let mut c = cfg(50, &[], TimeSampling::Fixed { t: 1e-9 });
        c.learning_rate = 1.0;
        // targets of size 1/√t push the loss far past the threshold
        let arch = Architecture::FixedTime { dim: 1, hidden: 4 };
        let model = MlpScoreModel::from_params(arch, alloc::vec![1e6; arch.param_count()]).unwrap();
        assert!(matches!(
            train_with(model, &anchors, &c),
            Err(Error::Diverged { .. })
        ));
    }
}
