use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::piecewise::PiecewiseLinear1D;
use crate::error::{check_time, Error, Result};
use crate::math::{GaussLegendre, GaussianWindow};
use crate::rng::{seeded, standard_normal, Rng};
use crate::scorefield::{EmpiricalScore, ScoreField, TrainingSet};

/// Gauss–Legendre nodes per sub-interval used when callers have no preference.
pub const DEFAULT_NODES: usize = 24;

/// A scalar function of the tangent coordinate that quadrature can integrate.
pub trait Score1D {
    fn value(&self, x: f64) -> f64;

    /// Points where the function is not smooth; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Score1D for PiecewiseLinear1D {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks().to_vec()
    }
}

impl<S: Score1D + ?Sized> Score1D for &S {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// The 1-D empirical score at a fixed time.
#[derive(Debug, Clone)]
pub struct EsfCurve<'a> {
    pub ts: &'a TrainingSet,
    pub t: f64,
}

impl Score1D for EsfCurve<'_> {
    fn value(&self, x: f64) -> f64 {
        (crate::scorefield::posterior_mean_unchecked(x, self.t, self.ts.points()) - x) / self.t
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// `t · E‖f(X, t) − ∇log p_t(X)‖²` with `X` drawn from the noised empirical
/// distribution, estimated from `n_samples` draws.
pub fn score_matching_loss_mc(
    field: &dyn ScoreField,
    t: f64,
    ts: &TrainingSet,
    n_samples: usize,
    seed: u64,
) -> Result<LossEstimate> {
    check_time(t)?;
    if n_samples == 0 {
        return Err(Error::param("n_samples", "must be at least 1"));
    }
    let d = ts.ambient_dim();
    if field.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: field.dim(),
        });
    }
    let target = EmpiricalScore::new(ts.clone());
    let mut rng = seeded(seed);
    let sd = t.sqrt();
    let mut x = alloc::vec![0.0; d];
    let mut f = alloc::vec![0.0; d];
    let mut g = alloc::vec![0.0; d];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_samples {
        let k = rng.random_range(0..ts.len());
        for (i, xi) in x.iter_mut().enumerate() {
            let base = if i == 0 { ts.points()[k] } else { 0.0 };
            *xi = base + sd * standard_normal(&mut rng);
        }
        field.eval_into(&x, t, &mut f)?;
        target.eval_into(&x, t, &mut g)?;
        let v = t * f
            .iter()
            .zip(&g)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        sum += v;
        sum_sq += v * v;
    }
    let m = n_samples as f64;
    let mean = sum / m;
    let var = if n_samples > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(LossEstimate {
        value: mean,
        std_error: (var / m).sqrt(),
    })
}

/// `(1/n) Σ_k E_{N(y_k, t)}[h(x)]` with `h` split at `breaks`.
fn mixture_expectation(
    ts: &TrainingSet,
    t: f64,
    nodes: usize,
    breaks: &[f64],
    h: impl Fn(f64) -> f64,
) -> Result<f64> {
    if nodes < 16 {
        return Err(Error::param("nodes", "need at least 16 quadrature nodes"));
    }
    let rule = GaussLegendre::new(nodes);
    let window = GaussianWindow::default();
    let sd = t.sqrt();
    let mut total = 0.0;
    for y in ts.points() {
        total += window.expectation(&rule, *y, sd, breaks, &h);
    }
    let v = total / ts.len() as f64;
    if !v.is_finite() {
        return Err(Error::Numeric(alloc::format!(
            "non-finite quadrature value {v}"
        )));
    }
    Ok(v)
}

/// Quadrature value of the score-matching loss `t · E(f − ∇log p_t)²` in one dimension.
///
/// Each Gaussian component is integrated over ±14 standard deviations, cut
/// at the kinks of `f` and at the cell midpoints, with `nodes`-point
/// Gauss–Legendre rules on pieces at most one standard deviation long.
pub fn score_matching_loss_quad(
    f: &dyn Score1D,
    t: f64,
    ts: &TrainingSet,
    nodes: usize,
) -> Result<f64> {
    check_time(t)?;
    let esf = EsfCurve { ts, t };
    let mut breaks = f.breakpoints();
    breaks.extend_from_slice(ts.midpoints());
    mixture_expectation(ts, t, nodes, &breaks, |x| {
        let d = f.value(x) - esf.value(x);
        t * d * d
    })
}

/// `(E_{p_t}(f − g)²)^{1/2}`, the `p_t`-weighted L² distance of two tangent scores.
pub fn l2_distance(
    f: &dyn Score1D,
    g: &dyn Score1D,
    t: f64,
    ts: &TrainingSet,
    nodes: usize,
) -> Result<f64> {
    check_time(t)?;
    let mut breaks = f.breakpoints();
    breaks.extend(g.breakpoints());
    breaks.extend_from_slice(ts.midpoints());
    let v = mixture_expectation(ts, t, nodes, &breaks, |x| {
        let d = f.value(x) - g.value(x);
        d * d
    })?;
    Ok(v.max(0.0).sqrt())
}
