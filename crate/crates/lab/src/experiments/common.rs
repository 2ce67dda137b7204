//! Pieces shared by several experiments and by the acceptance checks.

use serde::Serialize;

use scoresmooth_core::denoise::{integrate_backward, DenoiseRun, IntegrateOptions, NoiseSchedule};
use scoresmooth_core::nnscore::{
    fit_delta, train_fixed_t, train_time_conditioned, Architecture, MlpScoreModel, TrainOutcome,
};
use scoresmooth_core::regloss::{l2_distance, EsfCurve, PiecewiseLinear1D, Score1D, DEFAULT_NODES};
use scoresmooth_core::rng::derive_seed;
use scoresmooth_core::scorefield::{
    EmpiricalScore, ScoreField, SmoothedScore, SmoothingParams, TrainingSet, DEFAULT_CLIP_SCALE,
};
use scoresmooth_core::PointCloud;

use crate::config::NnSpec;

/// `δ ∈ {0.01Δ, 0.02Δ, …, 0.99Δ}`.
pub fn delta_grid(ts: &TrainingSet) -> Vec<f64> {
    (1..100)
        .map(|i| 0.01 * i as f64 * ts.half_spacing())
        .collect()
}

/// Evenly spaced points of `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One trained fixed-time model of a weight-decay sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub seed: u64,
    pub best_delta: f64,
    pub distance_smoothed: f64,
    pub distance_esf: f64,
    /// `max |f(x) + f(−x)| / max |f|` over `[−1.5D, 1.5D]`.
    pub odd_asymmetry: f64,
    pub final_loss: f64,
}

pub struct SweepModel {
    pub row: SweepRow,
    pub model: MlpScoreModel,
    pub losses: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
}

/// Trains one fixed-time model per `(seed index, λ)` and fits `δ` to each.
///
/// Training seeds are `derive_seed(seed, seed index)`, shared by all `λ`.
pub fn weight_decay_sweep(
    ts: &TrainingSet,
    nn: &NnSpec,
    seed: u64,
    mut progress: impl FnMut(&SweepRow),
) -> anyhow::Result<Vec<SweepModel>> {
    let anchors = ts.anchors();
    let grid = delta_grid(ts);
    let t = nn.time;
    let esf = EsfCurve { ts, t };
    let span = 1.5 * ts.half_width();
    let xs = linspace(-span, span, 301);
    let mut out = Vec::new();
    for s in 0..nn.seeds as u64 {
        let train_seed = derive_seed(seed, s);
        for &lambda in &nn.lambdas {
            let config = nn.fixed_time(lambda, train_seed);
            let TrainOutcome { model, losses } = train_fixed_t(&anchors, nn.hidden, &config)?;
            let fit = fit_delta(&model, t, ts, &grid, DEFAULT_NODES)?;
            let distance_esf = l2_distance(&model, &esf, t, ts, DEFAULT_NODES)?;
            let vals: Vec<f64> = xs.iter().map(|x| model.value(*x)).collect();
            let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let asym = vals
                .iter()
                .zip(vals.iter().rev())
                .fold(0.0f64, |m, (a, b)| m.max((a + b).abs()));
            let row = SweepRow {
                lambda,
                seed: train_seed,
                best_delta: fit.best_delta,
                distance_smoothed: fit.best_distance,
                distance_esf,
                odd_asymmetry: if peak > 0.0 { asym / peak } else { 0.0 },
                final_loss: losses.last().copied().unwrap_or(f64::NAN),
            };
            progress(&row);
            out.push(SweepModel {
                row,
                model,
                losses,
                curve: fit.curve,
            });
        }
    }
    Ok(out)
}

/// Trains the time-conditioned model on `anchors` for times up to `t0`.
pub fn train_conditioned(
    anchors: &PointCloud,
    nn: &NnSpec,
    t0: f64,
    seed: u64,
) -> anyhow::Result<(TrainOutcome, scoresmooth_core::nnscore::TrainConfig)> {
    let arch = Architecture::TimeConditioned {
        dim: anchors.dim(),
        hidden: nn.hidden,
        embed: nn.embed,
    };
    let config = nn.time_conditioned(t0, seed);
    Ok((train_time_conditioned(anchors, arch, &config)?, config))
}

/// The three fields compared in the denoising experiments.
pub fn empirical_field(ts: &TrainingSet) -> EmpiricalScore {
    EmpiricalScore::clipped(ts.clone(), DEFAULT_CLIP_SCALE)
}

pub fn smoothed_field(ts: &TrainingSet, kappa: f64) -> anyhow::Result<SmoothedScore> {
    Ok(SmoothedScore::new(ts.clone(), SmoothingParams::new(kappa)?))
}

pub fn denoise(
    field: &dyn ScoreField,
    schedule: &NoiseSchedule,
    start: &PointCloud,
    seed: u64,
    snapshot_times: &[f64],
) -> anyhow::Result<DenoiseRun> {
    let opts = IntegrateOptions {
        snapshot_times: snapshot_times.to_vec(),
        histograms: None,
    };
    Ok(integrate_backward(field, schedule, start, seed, &opts)?)
}

/// Summary of where denoised samples end up along the anchor line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TangentSummary {
    /// Share of samples within `near` of an anchor.
    pub near_fraction: f64,
    /// Share of samples farther than `far` from every anchor.
    pub far_fraction: f64,
}

pub fn tangent_summary(
    states: &PointCloud,
    anchors: &[f64],
    near: f64,
    far: f64,
) -> TangentSummary {
    let n = states.len() as f64;
    let dist = |x: f64| {
        anchors
            .iter()
            .fold(f64::INFINITY, |m, y| m.min((x - y).abs()))
    };
    let (mut close, mut away) = (0usize, 0usize);
    for p in states.iter() {
        let d = dist(p[0]);
        if d <= near {
            close += 1;
        }
        if d > far {
            away += 1;
        }
    }
    TangentSummary {
        near_fraction: close as f64 / n,
        far_fraction: away as f64 / n,
    }
}

/// Population standard deviation of coordinate `i`.
pub fn coordinate_sd(states: &PointCloud, i: usize) -> f64 {
    let v: Vec<f64> = states.column(i).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Radius band and off-anchor angle shares of samples around a circle of `n` anchors.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircleSummary {
    pub radius_in_band: f64,
    pub off_anchor_angle: f64,
    pub mean_radius: f64,
}

pub fn circle_summary(
    states: &PointCloud,
    n: usize,
    radius: f64,
    band: (f64, f64),
    angle_gap: f64,
) -> CircleSummary {
    let step = std::f64::consts::TAU / n as f64;
    let count = states.len() as f64;
    let (mut inside, mut off, mut rsum) = (0usize, 0usize, 0.0);
    for p in states.iter() {
        let r = p[0].hypot(p[1]) / radius;
        rsum += r;
        if r >= band.0 && r <= band.1 {
            inside += 1;
        }
        let u = p[1].atan2(p[0]) / step;
        if (u - u.round()).abs() * step > angle_gap {
            off += 1;
        }
    }
    CircleSummary {
        radius_in_band: inside as f64 / count,
        off_anchor_angle: off as f64 / count,
        mean_radius: rsum / count,
    }
}

/// Tangent-coordinate score curves of a 1-D set on `xs`.
pub fn score_curves(
    ts: &TrainingSet,
    t: f64,
    delta: f64,
    xs: &[f64],
) -> anyhow::Result<Vec<[f64; 4]>> {
    use scoresmooth_core::scorefield::{esf_1d, pl_esf};
    let smooth = PiecewiseLinear1D::smoothed_score(ts, t, delta)?;
    xs.iter()
        .map(|&x| Ok([x, esf_1d(x, t, ts)?, pl_esf(x, t, ts)?, smooth.eval(x)]))
        .collect()
}
