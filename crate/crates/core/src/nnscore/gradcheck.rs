use alloc::vec::Vec;

use super::mlp::{MlpScoreModel, TrainBatch};
use crate::error::Result;
use crate::rng::{derive_seed, seeded, Rng};

/// Outcome of comparing backpropagated gradients with central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradientCheck {
    pub checked: usize,
    pub worst_relative_error: f64,
}

/// A batch of `size` uniform inputs on `[−1.5, 1.5]ᵈ` with random targets;
/// times are drawn from `[10⁻⁴, 0.05]` for time-conditioned models and fixed
/// at 0.05 otherwise.
pub fn random_batch(model: &MlpScoreModel, size: usize, seed: u64) -> TrainBatch {
    let arch = model.architecture();
    let mut rng = seeded(seed);
    let d = arch.dim();
    let timed = arch.is_time_conditioned();
    TrainBatch {
        xs: (0..size * d).map(|_| rng.random_range(-1.5..1.5)).collect(),
        ts: (0..size)
            .map(|_| {
                if timed {
                    rng.random_range(1e-4..0.05)
                } else {
                    0.05
                }
            })
            .collect(),
        targets: (0..size * d)
            .map(|_| rng.random_range(-10.0..10.0))
            .collect(),
    }
}

/// Checks `per_batch` random parameters on each of `batches` random batches.
///
/// Parameters whose analytic gradient is below `10⁻⁶` are skipped (the
/// relative error is meaningless there). The step is `10⁻⁶·max(|θ|, 1)`.
pub fn gradient_check(
    model: &MlpScoreModel,
    batches: usize,
    per_batch: usize,
    seed: u64,
) -> Result<GradientCheck> {
    let n = model.param_count();
    let mut grad = alloc::vec![0.0; n];
    let mut scratch = alloc::vec![0.0; n];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for b in 0..batches as u64 {
        let batch = random_batch(model, 8, derive_seed(seed, b));
        model.batch_loss_grad(&batch, &mut grad)?;
        let candidates: Vec<usize> = (0..n).filter(|i| grad[*i].abs() >= 1e-6).collect();
        if candidates.is_empty() {
            continue;
        }
        let mut rng = seeded(derive_seed(seed, 1000 + b));
        for _ in 0..per_batch {
            let idx = candidates[rng.random_range(0..candidates.len())];
            let p = model.params()[idx];
            let h = 1e-6 * p.abs().max(1.0);
            let mut probe = model.clone();
            probe.params_mut()[idx] = p + h;
            let lp = probe.batch_loss_grad(&batch, &mut scratch)?;
            probe.params_mut()[idx] = p - h;
            let lm = probe.batch_loss_grad(&batch, &mut scratch)?;
            let fd = (lp - lm) / (2.0 * h);
            worst = worst.max((fd - grad[idx]).abs() / fd.abs().max(grad[idx].abs()));
            checked += 1;
        }
    }
    Ok(GradientCheck {
        checked,
        worst_relative_error: worst,
    })
}
