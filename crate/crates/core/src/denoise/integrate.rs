use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::histogram::Histogram;
use super::schedule::NoiseSchedule;
use crate::error::{Error, Result};
use crate::scorefield::{FieldKind, ScoreField};
use crate::PointCloud;

/// Binning of the per-time marginal histograms (same range for every coordinate).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IntegrateOptions {
    /// States are kept at the grid times closest to these.
    pub snapshot_times: Vec<f64>,
    /// Marginal histograms of every coordinate at every grid time.
    pub histograms: Option<HistogramSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub states: PointCloud,
}

/// Result of a backward Euler run.
#[derive(Debug, Clone)]
pub struct DenoiseRun {
    pub schedule: NoiseSchedule,
    pub times: Vec<f64>,
    pub field: FieldKind,
    pub seed: u64,
    pub initial: PointCloud,
    pub terminal: PointCloud,
    pub snapshots: Vec<Snapshot>,
    /// `histograms[step][coordinate]`; empty unless requested.
    pub histograms: Vec<Vec<Histogram>>,
}

impl DenoiseRun {
    pub fn sample_count(&self) -> usize {
        self.terminal.len()
    }

    /// The snapshot whose time is closest to `t`.
    pub fn snapshot_near(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

fn nearest_step(times: &[f64], target: f64) -> usize {
    times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Explicit Euler on `dx = −½ s_t(x) dt` backward along the schedule:
/// `x_{i+1} = x_i − ½ s(x_i, t_i)(t_{i+1} − t_i)`.
///
/// `seed` only labels the run; the integration itself is deterministic.
pub fn integrate_backward(
    field: &dyn ScoreField,
    schedule: &NoiseSchedule,
    x_start: &PointCloud,
    seed: u64,
    opts: &IntegrateOptions,
) -> Result<DenoiseRun> {
    schedule.validate()?;
    let d = field.dim();
    if x_start.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x_start.dim(),
        });
    }
    if let Some((i, _)) = x_start
        .as_flat()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::NonFiniteState {
            step: 0,
            sample: i / d,
        });
    }
    let times = schedule.times();
    let mut snap_steps: Vec<usize> = opts
        .snapshot_times
        .iter()
        .map(|t| nearest_step(&times, *t))
        .collect();
    snap_steps.sort_unstable();
    snap_steps.dedup();

    let mut x = x_start.as_flat().to_vec();
    let mut s = alloc::vec![0.0; x.len()];
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut histograms = Vec::new();

    let record = |step: usize,
                  x: &[f64],
                  snapshots: &mut Vec<Snapshot>,
                  histograms: &mut Vec<Vec<Histogram>>| {
        if snap_steps.binary_search(&step).is_ok() {
            snapshots.push(Snapshot {
                step,
                t: times[step],
                states: PointCloud::from_flat(d, x.to_vec()),
            });
        }
        if let Some(spec) = opts.histograms {
            let mut hs: Vec<Histogram> = (0..d)
                .map(|_| Histogram::new(spec.lo, spec.hi, spec.bins))
                .collect();
            for p in x.chunks_exact(d) {
                for (h, v) in hs.iter_mut().zip(p) {
                    h.add(*v);
                }
            }
            histograms.push(hs);
        }
    };

    record(0, &x, &mut snapshots, &mut histograms);
    for i in 0..times.len() - 1 {
        let (t, dt) = (times[i], times[i + 1] - times[i]);
        field.eval_batch(&x, t, &mut s)?;
        for (j, (xv, sv)) in x.iter_mut().zip(&s).enumerate() {
            *xv -= 0.5 * sv * dt;
            if !xv.is_finite() {
                return Err(Error::NonFiniteState {
                    step: i + 1,
                    sample: j / d,
                });
            }
        }
        record(i + 1, &x, &mut snapshots, &mut histograms);
    }

    Ok(DenoiseRun {
        schedule: *schedule,
        times,
        field: field.kind(),
        seed,
        initial: x_start.clone(),
        terminal: PointCloud::from_flat(d, x),
        snapshots,
        histograms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::flow_map_multi;
    use crate::scorefield::{SmoothedScore, SmoothingParams, TrainingSet, ZeroField};

    #[test]
    fn zero_field_is_identity() {
        let x = PointCloud::from_rows(2, [[0.3, -0.1], [1.0, 2.0]]);
        let sch = NoiseSchedule::new(0.02, 1e-5, 50, 2.0).unwrap();
        let run = integrate_backward(
            &ZeroField { dim: 2 },
            &sch,
            &x,
            0,
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert_eq!(run.terminal, x);
    }

    #[test]
    fn smoothed_flow_matches_closed_form() {
        let ts = TrainingSet::uniform(2, 1.0, 2).unwrap();
        let sp = SmoothingParams::new(1.0).unwrap();
        let field = SmoothedScore::new(ts.clone(), sp);
        let sch = NoiseSchedule::new(0.02, 1e-5, 2000, 2.0).unwrap();
        let x = PointCloud::from_rows(2, [[0.3, 0.1], [0.95, -0.2], [-1.3, 0.0]]);
        let opts = IntegrateOptions {
            snapshot_times: alloc::vec![0.005],
            histograms: Some(HistogramSpec {
                lo: -1.05,
                hi: 1.05,
                bins: 50,
            }),
        };
        let run = integrate_backward(&field, &sch, &x, 0, &opts).unwrap();
        for (p, q) in x.iter().zip(run.terminal.iter()) {
            let want = flow_map_multi(p, 1e-5, 0.02, &sp, &ts).unwrap();
            assert!(
                (want[0] - q[0]).abs() < 1e-3 && (want[1] - q[1]).abs() < 1e-3,
                "{want:?} vs {q:?}"
            );
        }
        assert_eq!(run.snapshots.len(), 1);
        assert_eq!(run.histograms.len(), 2000);
        assert_eq!(run.histograms[0][0].total(), 3);
    }
}
