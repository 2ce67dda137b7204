use std::fs;

use scoresmooth_core::nnscore::{Architecture, MlpScoreModel, TimeSampling, TrainConfig};
use scoresmooth_core::regloss::Score1D;
use scoresmooth_lab::checkpoint::Checkpoint;
use scoresmooth_lab::config::{ConfigError, ExperimentConfig, ExperimentKind};

#[test]
fn every_preset_survives_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ExperimentKind::ALL {
        let config = ExperimentConfig::preset(kind);
        let path = dir.path().join(format!("{}.json", kind.name()));
        fs::write(&path, config.to_json()).unwrap();
        let loaded = ExperimentConfig::load(path.to_str().unwrap(), kind).unwrap();
        assert_eq!(loaded, config);
        assert_eq!(loaded.hash(), config.hash());
    }
}

#[test]
fn missing_required_field_is_named() {
    for field in ["seed", "training_set", "nn"] {
        let mut v: serde_json::Value =
            serde_json::from_str(&ExperimentConfig::preset(ExperimentKind::Sweep).to_json())
                .unwrap();
        v.as_object_mut().unwrap().remove(field);
        let err = ExperimentConfig::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(err.to_string().contains(field), "{err}");
    }
}

#[test]
fn unknown_field_is_rejected() {
    let mut v: serde_json::Value =
        serde_json::from_str(&ExperimentConfig::preset(ExperimentKind::Circle).to_json()).unwrap();
    v["schedule"]["steps_per_unit"] = 3.into();
    let err = ExperimentConfig::from_json(&v.to_string()).unwrap_err();
    assert!(err.to_string().contains("steps_per_unit"), "{err}");
}

#[test]
fn unreadable_path_is_an_io_error() {
    let err =
        ExperimentConfig::load("/nonexistent/config.json", ExperimentKind::Verify).unwrap_err();
    assert!(matches!(err, ConfigError::Io { .. }));
}

#[test]
fn checkpoint_restores_the_same_function() {
    let dir = tempfile::tempdir().unwrap();
    let model = MlpScoreModel::init(Architecture::fixed_time(32), 11)
        .unwrap()
        .with_output_scale(20.0)
        .unwrap();
    let config = TrainConfig {
        learning_rate: 2e-4,
        batch_size: 64,
        steps: 10,
        weight_decay: 1.0,
        decay_groups: vec!["hidden".into(), "out".into()],
        seed: 4,
        time_sampling: TimeSampling::Fixed { t: 0.05 },
    };
    let path = dir.path().join("ckpt.json");
    Checkpoint::new(&model, &config).save(&path).unwrap();
    let restored = Checkpoint::load(&path).unwrap().model().unwrap();
    assert_eq!(restored.params(), model.params());
    for x in [-1.3, -0.2, 0.0, 0.7, 2.0] {
        assert_eq!(restored.value(x), model.value(x));
    }
}
