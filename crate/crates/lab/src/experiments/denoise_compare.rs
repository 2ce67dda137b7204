use std::path::Path;

use serde::Serialize;

use scoresmooth_core::denoise::{
    pushforward_density, sample_noised_empirical, terminal_decomposition, Density1D, Histogram,
    NoisedEmpirical1D,
};
use scoresmooth_core::rng::derive_seed;
use scoresmooth_core::scorefield::{ScoreField, SmoothingParams};

use super::common::{
    coordinate_sd, denoise, empirical_field, smoothed_field, tangent_summary, train_conditioned,
    TangentSummary,
};
use super::{figure, RunSummary};
use crate::checkpoint::Checkpoint;
use crate::config::ExperimentConfig;
use crate::output::RunWriter;

/// Trajectories written per field; the histograms use every sample.
const WRITTEN_TRAJECTORIES: usize = 5000;
const BINS: usize = 50;

#[derive(Serialize)]
struct HistogramAt {
    t: f64,
    step: usize,
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
    normal_sd: Vec<f64>,
}

#[derive(Serialize)]
struct FieldSummary {
    field: String,
    terminal: TangentSummary,
    /// `(t, sd ratio to t₀, √(t/t₀))` per snapshot and normal coordinate 2.
    normal_scaling: Vec<(f64, f64, f64)>,
}

#[derive(Serialize)]
struct AnalyticOverlay {
    bin_centers: Vec<f64>,
    /// `(t, density at bin centres)` of the pushforward of the noised data.
    pushforward: Vec<(f64, Vec<f64>)>,
    /// Normalized smooth terminal density at bin centres.
    terminal_smooth: Vec<f64>,
    atom_positions: Vec<f64>,
    atom_weights: Vec<f64>,
    smooth_mass: f64,
    delta_t0: f64,
}

pub fn run(config: &ExperimentConfig, root: &Path) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let ts = config
        .training_set
        .line(config.seed)?
        .ok_or_else(|| anyhow::anyhow!("denoise-compare needs a line layout"))?;
    let d = ts.ambient_dim();
    let schedule = config.schedule.build()?;
    let t0 = schedule.t0;
    let sp = SmoothingParams::new(config.smoothing.kappa)?;
    sp.checked_delta(t0, &ts)?;
    let start = sample_noised_empirical(t0, &ts, config.samples, derive_seed(config.seed, 0))?;
    let snapshot_times = [t0, t0 / 4.0, t0 / 16.0, schedule.t_min];
    let (lo, hi) = (-1.05 * ts.half_width(), 1.05 * ts.half_width());

    let empirical = empirical_field(&ts);
    let smoothed = smoothed_field(&ts, config.smoothing.kappa)?;
    let mut fields: Vec<(&str, Box<dyn ScoreField>)> = vec![
        ("empirical", Box::new(empirical)),
        ("smoothed", Box::new(smoothed)),
    ];
    if config.nn.steps > 0 {
        eprintln!(
            "training the time-conditioned model for {} steps",
            config.nn.steps
        );
        let (outcome, train_config) =
            train_conditioned(&ts.anchors(), &config.nn, t0, derive_seed(config.seed, 1))?;
        let ckpt = Checkpoint::new(&outcome.model, &train_config);
        w.write_text(
            "checkpoint_learned.json",
            &(serde_json::to_string_pretty(&ckpt)? + "\n"),
            "learned model weights",
        )?;
        let lambda = config.nn.weight_decay;
        w.write_csv(
            "loss_learned.csv",
            &["step", "loss", "lambda"],
            outcome
                .losses
                .iter()
                .enumerate()
                .map(|(i, l)| vec![i.to_string(), l.to_string(), lambda.to_string()]),
            "training loss per step",
        )?;
        fields.push(("learned", Box::new(outcome.model)));
    }

    let mut summaries = Vec::new();
    for (name, field) in &fields {
        let run = denoise(
            field.as_ref(),
            &schedule,
            &start,
            config.seed,
            &snapshot_times,
        )?;
        let kept = WRITTEN_TRAJECTORIES.min(config.samples);
        let mut header = vec!["t".to_string(), "sample".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        let rows = run.snapshots.iter().flat_map(|s| {
            s.states.iter().take(kept).enumerate().map(move |(j, p)| {
                let mut row = vec![s.t.to_string(), j.to_string()];
                row.extend(p.iter().map(|v| v.to_string()));
                row
            })
        });
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        w.write_csv(
            &format!("samples_{name}.csv"),
            &header_refs,
            rows,
            "states of the first trajectories at the snapshot times",
        )?;

        let sd0: Vec<f64> = (1..d).map(|i| coordinate_sd(&start, i)).collect();
        let mut hists = Vec::new();
        let mut scaling = Vec::new();
        for s in &run.snapshots {
            let mut h = Histogram::new(lo, hi, BINS);
            for p in s.states.iter() {
                h.add(p[0]);
            }
            let normal_sd: Vec<f64> = (1..d).map(|i| coordinate_sd(&s.states, i)).collect();
            if let (Some(sd), Some(base)) = (normal_sd.first(), sd0.first()) {
                scaling.push((s.t, sd / base, (s.t / t0).sqrt()));
            }
            hists.push(HistogramAt {
                t: s.t,
                step: s.step,
                lo,
                hi,
                counts: h.counts.clone(),
                underflow: h.underflow,
                overflow: h.overflow,
                normal_sd,
            });
        }
        w.write_json(
            &format!("histograms_{name}.json"),
            &serde_json::json!({ "field": name, "snapshots": hists }),
            "tangent histograms and normal spreads per snapshot",
        )?;
        summaries.push(FieldSummary {
            field: name.to_string(),
            terminal: tangent_summary(&run.terminal, ts.points(), 0.02, 0.1),
            normal_scaling: scaling,
        });
    }

    let source = NoisedEmpirical1D::new(&ts, t0)?;
    let width = (hi - lo) / BINS as f64;
    let centers: Vec<f64> = (0..BINS).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let mut pushforward = Vec::new();
    for &t in &snapshot_times[..3] {
        let law = pushforward_density(t, t0, &source, &sp, &ts)?;
        pushforward.push((t, centers.iter().map(|x| law.pdf(*x)).collect()));
    }
    let term = terminal_decomposition(t0, &source, &sp, &ts)?;
    let overlay = AnalyticOverlay {
        terminal_smooth: centers.iter().map(|x| term.smooth_part(*x)).collect(),
        bin_centers: centers,
        pushforward,
        atom_positions: ts.points().to_vec(),
        atom_weights: term.atom_weights().to_vec(),
        smooth_mass: term.smooth_mass(),
        delta_t0: term.delta(),
    };
    w.write_json(
        "analytic.json",
        &overlay,
        "analytic densities at bin centres and terminal atom weights",
    )?;
    w.write_json(
        "summary.json",
        &serde_json::json!({ "fields": summaries }),
        "terminal placement and normal-coordinate scaling per field",
    )?;
    Ok(RunSummary {
        dir: w.finish()?,
        failures: Vec::new(),
        report: None,
    })
}

/// Files a run writes, in manifest order.
pub fn declared_files(with_learned: bool) -> Vec<String> {
    let mut names = vec!["config.json".to_string()];
    if with_learned {
        names.push("checkpoint_learned.json".into());
        names.push("loss_learned.csv".into());
    }
    let fields: &[&str] = if with_learned {
        &["empirical", "smoothed", "learned"]
    } else {
        &["empirical", "smoothed"]
    };
    for f in fields {
        names.push(format!("samples_{f}.csv"));
        names.push(format!("histograms_{f}.json"));
    }
    names.extend([
        "analytic.json".to_string(),
        "summary.json".into(),
        "manifest.json".into(),
    ]);
    names
}
