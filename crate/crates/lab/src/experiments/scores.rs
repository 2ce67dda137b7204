use std::path::Path;

use scoresmooth_core::regloss::{PiecewiseLinear1D, Score1D};
use scoresmooth_core::scorefield::{esf_1d, SmoothingParams};

use super::common::{linspace, score_curves, weight_decay_sweep, SweepModel, SweepRow};
use super::{figure, fmt_lambda, RunOptions, RunSummary};
use crate::checks::smoothing_trend;
use crate::config::ExperimentConfig;
use crate::output::RunWriter;

const SWEEP_HEADER: [&str; 7] = [
    "lambda",
    "seed",
    "best_delta",
    "distance_smoothed",
    "distance_esf",
    "odd_asymmetry",
    "final_loss",
];

fn sweep_rows(models: &[SweepModel]) -> Vec<Vec<String>> {
    models
        .iter()
        .map(|m| {
            let r = &m.row;
            vec![
                r.lambda.to_string(),
                r.seed.to_string(),
                r.best_delta.to_string(),
                r.distance_smoothed.to_string(),
                r.distance_esf.to_string(),
                r.odd_asymmetry.to_string(),
                r.final_loss.to_string(),
            ]
        })
        .collect()
}

fn log_row(r: &SweepRow) {
    eprintln!(
        "λ = {}, seed {}: δ = {:.3}, distance to ŝ {:.4}, to ESF {:.4}",
        r.lambda, r.seed, r.best_delta, r.distance_smoothed, r.distance_esf
    );
}

fn write_fit_curves(w: &mut RunWriter, models: &[SweepModel]) -> anyhow::Result<()> {
    let rows = models.iter().flat_map(|m| {
        m.curve.iter().map(move |(d, dist)| {
            vec![
                m.row.lambda.to_string(),
                m.row.seed.to_string(),
                d.to_string(),
                dist.to_string(),
            ]
        })
    });
    w.write_csv(
        "delta_curves.csv",
        &["lambda", "seed", "delta", "distance"],
        rows,
        "distance to ŝ over the δ grid for every model",
    )?;
    Ok(())
}

/// Analytic curves plus one learned curve per λ (first seed only).
pub fn score_eval(config: &ExperimentConfig, root: &Path) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let ts = config
        .training_set
        .line(config.seed)?
        .ok_or_else(|| anyhow::anyhow!("score-eval needs a line layout"))?;
    let t = config.nn.time;
    let delta = SmoothingParams::new(config.smoothing.kappa)?.checked_delta(t, &ts)?;
    let span = 1.5 * ts.half_width();
    let xs = linspace(-span, span, 601);
    let curves = score_curves(&ts, t, delta, &xs)?;

    let mut nn = config.nn.clone();
    nn.seeds = 1;
    let models = if nn.lambdas.is_empty() {
        Vec::new()
    } else {
        weight_decay_sweep(&ts, &nn, config.seed, log_row)?
    };
    let fitted: Vec<PiecewiseLinear1D> = models
        .iter()
        .map(|m| PiecewiseLinear1D::smoothed_score(&ts, t, m.row.best_delta))
        .collect::<Result<_, _>>()?;

    let mut header = vec![
        "x".to_string(),
        "esf".into(),
        "pl_esf".into(),
        "smoothed".into(),
    ];
    for m in &models {
        header.push(format!("nn_lambda_{}", fmt_lambda(m.row.lambda)));
        header.push(format!("smoothed_fit_lambda_{}", fmt_lambda(m.row.lambda)));
    }
    let rows = curves.iter().map(|c| {
        let mut row: Vec<f64> = c.to_vec();
        for (m, f) in models.iter().zip(&fitted) {
            row.push(m.model.value(c[0]));
            row.push(f.eval(c[0]));
        }
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    w.write_csv("curves.csv", &header_refs, rows, "tangent scores on a grid: ESF, PL-ESF, ŝ at κ√t, and per λ the learned score with ŝ at its fitted δ")?;
    if !models.is_empty() {
        w.write_csv(
            "fits.csv",
            &SWEEP_HEADER,
            sweep_rows(&models),
            "fitted δ and distances per λ",
        )?;
        write_fit_curves(&mut w, &models)?;
    }
    Ok(RunSummary {
        dir: w.finish()?,
        failures: Vec::new(),
        report: None,
    })
}

/// Every seed and λ; optionally asserts the smoothing trend.
pub fn sweep(
    config: &ExperimentConfig,
    root: &Path,
    opts: RunOptions,
) -> anyhow::Result<RunSummary> {
    let start = std::time::Instant::now();
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let ts = config
        .training_set
        .line(config.seed)?
        .ok_or_else(|| anyhow::anyhow!("sweep needs a line layout"))?;
    let models = weight_decay_sweep(&ts, &config.nn, config.seed, log_row)?;
    w.write_csv(
        "sweep.csv",
        &SWEEP_HEADER,
        sweep_rows(&models),
        "fitted δ and distances per (λ, seed)",
    )?;
    write_fit_curves(&mut w, &models)?;
    let rows: Vec<SweepRow> = models.iter().map(|m| m.row.clone()).collect();
    let check = smoothing_trend(&rows, start.elapsed().as_secs_f64());
    eprintln!("{check}");
    let mut check_json = serde_json::to_value(&check)?;
    // wall time would make reruns differ
    if let Some(obj) = check_json.as_object_mut() {
        obj.remove("seconds");
        if let Some(serde_json::Value::Array(ms)) = obj.get_mut("metrics") {
            ms.retain(|m| m["name"] != "runtime_seconds");
        }
    }
    let report = w.write_json(
        "trend.json",
        &check_json,
        "monotone-δ and distance assertions",
    )?;
    let failures = if opts.assert {
        check
            .failures()
            .filter(|m| m.name != "runtime_seconds")
            .map(|m| format!("{} = {}", m.name, m.value))
            .collect()
    } else {
        Vec::new()
    };
    Ok(RunSummary {
        dir: w.finish()?,
        failures,
        report: Some(report),
    })
}

/// Learned scores on a jittered grid for several λ.
pub fn nonuniform(config: &ExperimentConfig, root: &Path) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let ts = config
        .training_set
        .line(config.seed)?
        .ok_or_else(|| anyhow::anyhow!("nonuniform needs a line layout"))?;
    w.write_csv(
        "anchors.csv",
        &["index", "y"],
        ts.points()
            .iter()
            .enumerate()
            .map(|(i, y)| vec![i.to_string(), y.to_string()]),
        "the jittered training points",
    )?;
    let t = config.nn.time;
    let models = weight_decay_sweep(&ts, &config.nn, config.seed, log_row)?;
    let span = 1.5 * ts.half_width();
    let xs = linspace(-span, span, 601);
    let mut header = vec!["x".to_string(), "esf".into()];
    header.extend(
        models
            .iter()
            .map(|m| format!("nn_lambda_{}_seed_{}", fmt_lambda(m.row.lambda), m.row.seed)),
    );
    let rows = xs
        .iter()
        .map(|&x| {
            let mut row = vec![x, esf_1d(x, t, &ts)?];
            row.extend(models.iter().map(|m| m.model.value(x)));
            Ok(row)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    w.write_csv(
        "curves.csv",
        &header_refs,
        rows,
        "ESF and learned scores on a grid",
    )?;
    w.write_csv(
        "fits.csv",
        &SWEEP_HEADER,
        sweep_rows(&models),
        "fitted δ (per-cell smoothing) and distances per λ",
    )?;
    Ok(RunSummary {
        dir: w.finish()?,
        failures: Vec::new(),
        report: None,
    })
}
