//! Model checkpoints: a JSON document whose `weights` field is the flat
//! parameter vector as little-endian `f64` bytes in base64.

use std::path::Path;

use anyhow::{bail, Context};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use scoresmooth_core::nnscore::{Architecture, MlpScoreModel, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub architecture: Architecture,
    pub output_scale: f64,
    pub config: TrainConfig,
    pub seed: u64,
    pub param_count: usize,
    pub weights: String,
}

impl Checkpoint {
    pub fn new(model: &MlpScoreModel, config: &TrainConfig) -> Self {
        let bytes: Vec<u8> = model
            .params()
            .iter()
            .flat_map(|p| p.to_le_bytes())
            .collect();
        Self {
            architecture: model.architecture(),
            output_scale: model.output_scale(),
            config: config.clone(),
            seed: config.seed,
            param_count: model.param_count(),
            weights: STANDARD.encode(bytes),
        }
    }

    pub fn model(&self) -> anyhow::Result<MlpScoreModel> {
        let bytes = STANDARD
            .decode(&self.weights)
            .context("weights are not valid base64")?;
        if bytes.len() != 8 * self.param_count {
            bail!(
                "expected {} weights, found {} bytes",
                self.param_count,
                bytes.len()
            );
        }
        let params = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight")))
            .collect();
        let model = MlpScoreModel::from_params(self.architecture, params)?;
        Ok(model.with_output_scale(self.output_scale)?)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scoresmooth_core::nnscore::TimeSampling;

    #[test]
    fn weights_survive_a_round_trip() {
        let model = MlpScoreModel::init(Architecture::FixedTime { dim: 1, hidden: 8 }, 3)
            .unwrap()
            .with_output_scale(20.0)
            .unwrap();
        let config = TrainConfig {
            learning_rate: 1e-3,
            batch_size: 4,
            steps: 1,
            weight_decay: 0.0,
            decay_groups: vec![],
            seed: 9,
            time_sampling: TimeSampling::Fixed { t: 0.05 },
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        Checkpoint::new(&model, &config).save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back.config, config);
        let m = back.model().unwrap();
        assert_eq!(m.params(), model.params());
        assert_eq!(m.output_scale(), 20.0);
    }
}
