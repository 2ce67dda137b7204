use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::kappa::{f_inverse, f_kappa};
use super::loss::score_matching_loss_quad;
use super::piecewise::PiecewiseLinear1D;
use crate::error::{check_time, Error, Result};
use crate::scorefield::{SmoothingParams, TrainingSet};

/// `R[f] = ∫|f″|`, which for a piecewise-linear `f` is the sum of absolute slope jumps.
pub fn nonsmoothness_r(f: &PiecewiseLinear1D) -> f64 {
    f.slope_jumps().iter().map(|j| j.abs()).sum()
}

/// `R[ŝ_{t,δ}]` without building the function.
///
/// Each gap contributes two jumps of `h/((h − δ)t)`; for uniform sets this is
/// `2(n − 1)Δ/(t(Δ − δ))`.
pub fn smoothed_r_closed_form(ts: &TrainingSet, t: f64, delta: f64) -> f64 {
    if ts.is_uniform() {
        let d = ts.half_spacing();
        return 2.0 * (ts.len() - 1) as f64 * d / (t * (d - delta));
    }
    (0..ts.len() - 1)
        .map(|k| {
            let h = ts.half_gap(k);
            2.0 * h / ((h - delta) * t)
        })
        .sum()
}

/// Lower bound `2(n − 1 − 2n√ε)/t` on `R` over all `f` with loss below `ε`.
pub fn r_lower_bound(n: usize, eps: f64, t: f64) -> f64 {
    let n = n as f64;
    2.0 * (n - 1.0 - 2.0 * n * eps.sqrt()) / t
}

/// Feasibility and near-optimality of `ŝ_{t,κ√t}` for the loss-constrained
/// smoothness problem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimalityReport {
    pub epsilon: f64,
    pub kappa: f64,
    pub t: f64,
    pub n: usize,
    pub delta: f64,
    pub loss_value: f64,
    /// `R[ŝ]` from the slope jumps of the constructed function.
    pub r_candidate: f64,
    pub r_closed_form: f64,
    pub r_lower_bound: f64,
    pub ratio: f64,
    pub feasible: bool,
    pub near_optimal: bool,
}

pub fn optimality_report(
    eps: f64,
    kappa: f64,
    t: f64,
    ts: &TrainingSet,
    nodes: usize,
) -> Result<OptimalityReport> {
    if !(eps > 0.0 && eps < 0.015) {
        return Err(Error::param(
            "eps",
            alloc::format!("must lie in (0, 0.015), got {eps}"),
        ));
    }
    if !ts.is_uniform() {
        return Err(Error::InvalidTrainingSet(
            "the lower bound needs uniformly spaced anchors".into(),
        ));
    }
    let k_min = f_inverse(eps)?;
    if !(kappa >= k_min) {
        return Err(Error::param(
            "kappa",
            alloc::format!("must be at least F⁻¹(ε) = {k_min}, got {kappa}"),
        ));
    }
    check_time(t)?;
    let sp = SmoothingParams::new(kappa)?;
    let delta = sp.checked_delta(t, ts)?;
    let f = PiecewiseLinear1D::smoothed_score(ts, t, delta)?;
    let loss_value = score_matching_loss_quad(&f, t, ts, nodes)?;
    let r_candidate = nonsmoothness_r(&f);
    let lb = r_lower_bound(ts.len(), eps, t);
    let ratio = r_candidate / lb;
    Ok(OptimalityReport {
        epsilon: eps,
        kappa,
        t,
        n: ts.len(),
        delta,
        loss_value,
        r_candidate,
        r_closed_form: smoothed_r_closed_form(ts, t, delta),
        r_lower_bound: lb,
        ratio,
        feasible: loss_value < eps,
        near_optimal: lb > 0.0 && ratio < 1.0 + 8.0 * eps.sqrt(),
    })
}

/// One row of the small-time convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceRow {
    pub t: f64,
    pub loss: f64,
    /// `(n − 1)/n · F(κ)`.
    pub limit: f64,
    pub residual: f64,
    /// `residual / √t`.
    pub scaled_residual: f64,
}

/// Loss of `ŝ_{t,κ√t}` against its small-time limit `(n − 1)/n · F(κ)` on a grid of times.
pub fn lemma1_convergence_check(
    kappa: f64,
    ts: &TrainingSet,
    t_grid: &[f64],
    nodes: usize,
) -> Result<Vec<ConvergenceRow>> {
    let sp = SmoothingParams::new(kappa)?;
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("t_grid", "must be strictly decreasing"));
    }
    let n = ts.len() as f64;
    let limit = (n - 1.0) / n * f_kappa(kappa);
    t_grid
        .iter()
        .map(|&t| {
            check_time(t)?;
            let delta = sp.checked_delta(t, ts)?;
            let f = PiecewiseLinear1D::smoothed_score(ts, t, delta)?;
            let loss = score_matching_loss_quad(&f, t, ts, nodes)?;
            let residual = (loss - limit).abs();
            Ok(ConvergenceRow {
                t,
                loss,
                limit,
                residual,
                scaled_residual: residual / t.sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regloss::DEFAULT_NODES;
    use approx::assert_relative_eq;

    #[test]
    fn r_examples() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let f = PiecewiseLinear1D::smoothed_score(&ts, 0.04, 0.2).unwrap();
        assert_relative_eq!(nonsmoothness_r(&f), 62.5, max_relative = 1e-12);
        assert_relative_eq!(
            smoothed_r_closed_form(&ts, 0.04, 0.2),
            62.5,
            max_relative = 1e-12
        );
        assert_eq!(nonsmoothness_r(&PiecewiseLinear1D::affine(3.0, -1.0)), 0.0);
    }

    #[test]
    fn report_examples() {
        for n in [2, 4] {
            let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
            let r = optimality_report(0.01, 2.1, 1e-5, &ts, DEFAULT_NODES).unwrap();
            assert!(r.feasible, "{r:?}");
            assert!(r.near_optimal, "{r:?}");
            let d = ts.half_spacing();
            let want =
                d * (n - 1) as f64 / ((n as f64 - 1.0 - 2.0 * n as f64 * 0.1) * (d - r.delta));
            assert_relative_eq!(r.ratio, want, max_relative = 1e-10);
        }
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        assert!(optimality_report(0.01, 0.5, 1e-5, &ts, DEFAULT_NODES).is_err());
        assert!(optimality_report(0.02, 3.0, 1e-5, &ts, DEFAULT_NODES).is_err());
    }

    #[test]
    fn convergence_table() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let rows = lemma1_convergence_check(1.0, &ts, &[1e-3, 1e-4, 1e-5], DEFAULT_NODES).unwrap();
        assert_relative_eq!(
            rows[0].limit,
            0.075_339_783_343_770_78,
            max_relative = 1e-12
        );
        assert!(rows[2].residual < rows[0].residual);
        assert!(lemma1_convergence_check(0.0, &ts, &[1e-3], DEFAULT_NODES).is_err());
        assert!(lemma1_convergence_check(1.0, &ts, &[1e-4, 1e-3], DEFAULT_NODES).is_err());
    }
}
