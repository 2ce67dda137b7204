use std::path::Path;

use scoresmooth_core::denoise::sample_noised_points;
use scoresmooth_core::nnscore::{fit_delta, train_fixed_t, TrainConfig, TrainOutcome};
use scoresmooth_core::regloss::{l2_distance, EsfCurve, PiecewiseLinear1D, Score1D, DEFAULT_NODES};
use scoresmooth_core::rng::derive_seed;
use scoresmooth_core::scorefield::esf_1d;

use super::common::{circle_summary, delta_grid, denoise, linspace, train_conditioned};
use super::{figure, RunOptions, RunSummary};
use crate::checkpoint::Checkpoint;
use crate::config::{ExperimentConfig, TrainingSetSpec};
use crate::output::RunWriter;

fn write_training(
    w: &mut RunWriter,
    outcome: &TrainOutcome,
    config: &TrainConfig,
) -> anyhow::Result<()> {
    let ckpt = Checkpoint::new(&outcome.model, config);
    w.write_text(
        "checkpoint.json",
        &(serde_json::to_string_pretty(&ckpt)? + "\n"),
        "trained model weights",
    )?;
    let lambda = config.weight_decay;
    w.write_csv(
        "loss.csv",
        &["step", "loss", "lambda"],
        outcome
            .losses
            .iter()
            .enumerate()
            .map(|(i, l)| vec![i.to_string(), l.to_string(), lambda.to_string()]),
        "training loss per step",
    )?;
    Ok(())
}

/// One fixed-time model at `nn.time` with decay `nn.weight_decay`.
pub fn train_1d(config: &ExperimentConfig, root: &Path) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let ts = config
        .training_set
        .line(config.seed)?
        .ok_or_else(|| anyhow::anyhow!("train-1d needs a line layout"))?;
    if ts.ambient_dim() != 1 {
        anyhow::bail!("train-1d needs a one-dimensional training set");
    }
    let t = config.nn.time;
    let train_config = config
        .nn
        .fixed_time(config.nn.weight_decay, derive_seed(config.seed, 0));
    let outcome = train_fixed_t(&ts.anchors(), config.nn.hidden, &train_config)?;
    write_training(&mut w, &outcome, &train_config)?;
    let fit = fit_delta(&outcome.model, t, &ts, &delta_grid(&ts), DEFAULT_NODES)?;
    let esf = EsfCurve { ts: &ts, t };
    let distance_esf = l2_distance(&outcome.model, &esf, t, &ts, DEFAULT_NODES)?;
    let smooth = PiecewiseLinear1D::smoothed_score(&ts, t, fit.best_delta)?;
    let span = 1.5 * ts.half_width();
    let rows = linspace(-span, span, 601)
        .into_iter()
        .map(|x| {
            Ok(vec![
                x,
                outcome.model.value(x),
                esf_1d(x, t, &ts)?,
                smooth.eval(x),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    w.write_csv(
        "curve.csv",
        &["x", "nn", "esf", "smoothed_fit"],
        rows,
        "learned score, ESF and ŝ at the fitted δ",
    )?;
    w.write_json(
        "fit.json",
        &serde_json::json!({
            "best_delta": fit.best_delta,
            "distance_smoothed": fit.best_distance,
            "distance_esf": distance_esf,
            "final_loss": outcome.final_loss(),
        }),
        "fitted δ and distances",
    )?;
    Ok(RunSummary {
        dir: w.finish()?,
        failures: Vec::new(),
        report: None,
    })
}

/// The time-conditioned model on a line embedded in ℝᵈ.
pub fn train_2d(config: &ExperimentConfig, root: &Path) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let anchors = config.training_set.anchors(config.seed)?;
    let (outcome, train_config) = train_conditioned(
        &anchors,
        &config.nn,
        config.schedule.t0,
        derive_seed(config.seed, 1),
    )?;
    write_training(&mut w, &outcome, &train_config)?;
    let k = outcome.losses.len().min(1000);
    w.write_json(
        "summary.json",
        &serde_json::json!({
            "leading_mean_loss": outcome.mean_loss(0..k),
            "trailing_mean_loss": outcome.mean_loss(outcome.losses.len() - k..outcome.losses.len()),
            "parameters": outcome.model.param_count(),
        }),
        "loss averages over the first and last 1000 steps",
    )?;
    Ok(RunSummary {
        dir: w.finish()?,
        failures: Vec::new(),
        report: None,
    })
}

/// Time-conditioned training on a circle, then denoising with the learned field.
pub fn circle(
    config: &ExperimentConfig,
    root: &Path,
    opts: RunOptions,
) -> anyhow::Result<RunSummary> {
    let TrainingSetSpec::Circle { n, radius } = config.training_set else {
        anyhow::bail!("circle needs the circle layout");
    };
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let anchors = config.training_set.anchors(config.seed)?;
    let (outcome, train_config) = train_conditioned(
        &anchors,
        &config.nn,
        config.schedule.t0,
        derive_seed(config.seed, 1),
    )?;
    write_training(&mut w, &outcome, &train_config)?;
    let schedule = config.schedule.build()?;
    let start = sample_noised_points(
        schedule.t0,
        &anchors,
        config.samples,
        derive_seed(config.seed, 0),
    )?;
    let run = denoise(&outcome.model, &schedule, &start, config.seed, &[])?;
    let rows = start
        .iter()
        .zip(run.terminal.iter())
        .map(|(a, b)| vec![a[0], a[1], b[0], b[1]]);
    w.write_csv(
        "samples.csv",
        &["x0_1", "x0_2", "x_end_1", "x_end_2"],
        rows,
        "start and terminal positions of every trajectory",
    )?;
    let s = circle_summary(&run.terminal, n, radius, (0.8, 1.02), 0.1);
    let report = w.write_json(
        "summary.json",
        &s,
        "radius-band and off-anchor-angle shares",
    )?;
    let mut failures = Vec::new();
    if opts.assert {
        if s.radius_in_band < 0.9 {
            failures.push(format!(
                "share with radius in [0.8, 1.02] = {} (need ≥ 0.9)",
                s.radius_in_band
            ));
        }
        if s.off_anchor_angle < 0.05 {
            failures.push(format!(
                "share off the anchor angles = {} (need ≥ 0.05)",
                s.off_anchor_angle
            ));
        }
    }
    Ok(RunSummary {
        dir: w.finish()?,
        failures,
        report: Some(report),
    })
}
