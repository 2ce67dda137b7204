use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::regloss::{l2_distance, PiecewiseLinear1D, Score1D};
use crate::scorefield::TrainingSet;

/// Result of [`fit_delta`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaFit {
    pub best_delta: f64,
    pub best_distance: f64,
    /// `(δ, distance)` for every grid value, in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// The `δ` whose `ŝ_{t,δ}` is closest to `model` in `p_t`-weighted L²; ties go to the smaller `δ`.
pub fn fit_delta(
    model: &dyn Score1D,
    t: f64,
    ts: &TrainingSet,
    delta_grid: &[f64],
    nodes: usize,
) -> Result<DeltaFit> {
    if delta_grid.is_empty() {
        return Err(Error::param("delta_grid", "must not be empty"));
    }
    let mut curve = Vec::with_capacity(delta_grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &delta in delta_grid {
        let candidate = PiecewiseLinear1D::smoothed_score(ts, t, delta)?;
        let dist = l2_distance(model, &candidate, t, ts, nodes)?;
        curve.push((delta, dist));
        best = match best {
            Some((bd, bv)) if bv < dist || (bv == dist && bd <= delta) => Some((bd, bv)),
            _ => Some((delta, dist)),
        };
    }
    let (best_delta, best_distance) = best.expect("grid is non-empty");
    Ok(DeltaFit {
        best_delta,
        best_distance,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regloss::EsfCurve;

    fn grid() -> Vec<f64> {
        (1..20).map(|i| 0.05 * i as f64).collect()
    }

    #[test]
    fn recovers_its_own_delta() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let target = PiecewiseLinear1D::smoothed_score(&ts, 0.05, 0.3).unwrap();
        let fit = fit_delta(&target, 0.05, &ts, &grid(), 16).unwrap();
        assert!((fit.best_delta - 0.3).abs() < 1e-12);
        assert!(fit.best_distance < 1e-9);
        assert_eq!(fit.curve.len(), 19);
    }

    #[test]
    fn empirical_score_prefers_the_widest_band() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let esf = EsfCurve { ts: &ts, t: 0.005 };
        let fit = fit_delta(&esf, 0.005, &ts, &grid(), 16).unwrap();
        assert_eq!(fit.best_delta, *grid().last().unwrap());
        assert!(fit_delta(&esf, 0.005, &ts, &[], 16).is_err());
    }
}
