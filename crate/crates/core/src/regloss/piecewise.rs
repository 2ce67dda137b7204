use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{normal_cdf, normal_pdf, normal_sf};
use crate::scorefield::TrainingSet;

/// Continuous piecewise-linear function on ℝ.
///
/// Breakpoints `b_0 < … < b_{m−1}` cut the line into `m + 1` segments;
/// segment `i` is `(b_{i−1}, b_i]` with the two outer ones unbounded.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseLinear1D {
    breaks: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

const CONTINUITY_TOL: f64 = 1e-10;

impl PiecewiseLinear1D {
    pub fn new(breaks: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        if slopes.len() != breaks.len() + 1 || intercepts.len() != slopes.len() {
            return Err(Error::param(
                "segments",
                "need one more slope/intercept than breakpoints",
            ));
        }
        if breaks
            .iter()
            .chain(&slopes)
            .chain(&intercepts)
            .any(|v| !v.is_finite())
        {
            return Err(Error::param("segments", "all coefficients must be finite"));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("breaks", "must be strictly increasing"));
        }
        for (i, b) in breaks.iter().enumerate() {
            let l = slopes[i] * b + intercepts[i];
            let r = slopes[i + 1] * b + intercepts[i + 1];
            let scale = l.abs().max(r.abs()).max(1.0);
            if (l - r).abs() > CONTINUITY_TOL * scale {
                return Err(Error::param(
                    "segments",
                    alloc::format!("discontinuous at breakpoint {b}: {l} vs {r}"),
                ));
            }
        }
        Ok(Self {
            breaks,
            slopes,
            intercepts,
        })
    }

    /// `x ↦ slope·x + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self {
            breaks: Vec::new(),
            slopes: alloc::vec![slope],
            intercepts: alloc::vec![intercept],
        }
    }

    /// Linear interpolation through `(xs[i], ys[i])`, extended by the given end slopes.
    pub fn from_knots(xs: &[f64], ys: &[f64], left_slope: f64, right_slope: f64) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::param("knots", "need matching, non-empty knot lists"));
        }
        let m = xs.len();
        let mut slopes = Vec::with_capacity(m + 1);
        let mut intercepts = Vec::with_capacity(m + 1);
        slopes.push(left_slope);
        intercepts.push(ys[0] - left_slope * xs[0]);
        for i in 0..m - 1 {
            let s = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            slopes.push(s);
            intercepts.push(ys[i] - s * xs[i]);
        }
        slopes.push(right_slope);
        intercepts.push(ys[m - 1] - right_slope * xs[m - 1]);
        Self::new(xs.to_vec(), slopes, intercepts)
    }

    /// Interpolates `f` on `knots` equally spaced points of `[a, b]`.
    pub fn interpolate(
        f: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        knots: usize,
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self> {
        if knots < 2 || b <= a {
            return Err(Error::param(
                "knots",
                "need at least two knots on a proper interval",
            ));
        }
        let h = (b - a) / (knots - 1) as f64;
        let xs: Vec<f64> = (0..knots).map(|i| a + h * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
        Self::from_knots(&xs, &ys, left_slope, right_slope)
    }

    /// `ŝ_{t,δ}` of a training set as a piecewise-linear function (tangent coordinate).
    pub fn smoothed_score(ts: &TrainingSet, t: f64, delta: f64) -> Result<Self> {
        crate::error::check_time(t)?;
        if !(delta > 0.0 && delta < ts.half_spacing()) {
            return Err(Error::param("delta", "must lie in (0, Δ)"));
        }
        let y = ts.points();
        let z = ts.midpoints();
        let n = y.len();
        let mut breaks = Vec::with_capacity(2 * n);
        let mut slopes = Vec::with_capacity(2 * n + 1);
        let mut intercepts = Vec::with_capacity(2 * n + 1);
        let band = -1.0 / t;
        for k in 0..n {
            if k > 0 {
                breaks.push(y[k] - delta);
            }
            slopes.push(band);
            intercepts.push(y[k] / t);
            if k + 1 < n {
                breaks.push(y[k] + delta);
                let h = ts.half_gap(k);
                let s = delta / ((h - delta) * t);
                slopes.push(s);
                intercepts.push(-s * z[k]);
            }
        }
        Self::new(breaks, slopes, intercepts)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    fn segment(&self, x: f64) -> usize {
        self.breaks.partition_point(|b| *b < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        self.slopes[i] * x + self.intercepts[i]
    }

    /// `f′(b⁺) − f′(b⁻)` at every breakpoint.
    pub fn slope_jumps(&self) -> Vec<f64> {
        self.slopes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `f + (slope·x + intercept)`.
    pub fn add_affine(&self, slope: f64, intercept: f64) -> Self {
        Self {
            breaks: self.breaks.clone(),
            slopes: self.slopes.iter().map(|s| s + slope).collect(),
            intercepts: self.intercepts.iter().map(|c| c + intercept).collect(),
        }
    }

    /// `∫ (f − g)² N(x; mean, var) dx` in closed form.
    ///
    /// On every segment of the common refinement `f − g = α + βu` with
    /// `u = (x − mean)/σ`, and the integral reduces to the truncated normal
    /// moments `M0, M1, M2` of that segment.
    pub fn gaussian_sq_distance(&self, other: &Self, mean: f64, var: f64) -> f64 {
        let sd = var.sqrt();
        let mut cuts: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let mut total = 0.0;
        let mut lo = f64::NEG_INFINITY;
        for i in 0..=cuts.len() {
            let hi = if i < cuts.len() {
                cuts[i]
            } else {
                f64::INFINITY
            };
            let x_ref = if lo.is_finite() {
                lo
            } else if hi.is_finite() {
                hi
            } else {
                0.0
            };
            // any point of the open segment picks the right pieces
            let probe = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + 1.0
            } else {
                x_ref - 1.0
            };
            let (i_f, i_g) = (self.segment(probe), other.segment(probe));
            let beta_x = self.slopes[i_f] - other.slopes[i_g];
            let alpha_x = self.intercepts[i_f] - other.intercepts[i_g];
            let alpha = alpha_x + beta_x * mean;
            let beta = beta_x * sd;
            let ua = (lo - mean) / sd;
            let ub = (hi - mean) / sd;
            let (m0, m1, m2) = truncated_moments(ua, ub);
            total += alpha * alpha * m0 + 2.0 * alpha * beta * m1 + beta * beta * m2;
            lo = hi;
        }
        total
    }
}

/// `∫_a^b u^j φ(u) du` for `j = 0, 1, 2`.
fn truncated_moments(a: f64, b: f64) -> (f64, f64, f64) {
    let m0 = if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    let (pa, pb) = (normal_pdf(a), normal_pdf(b));
    let m1 = pa - pb;
    let ta = if a.is_finite() { a * pa } else { 0.0 };
    let tb = if b.is_finite() { b * pb } else { 0.0 };
    (m0, m1, m0 + ta - tb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smoothed_score_matches_evaluator() {
        let ts = TrainingSet::uniform(4, 1.0, 1).unwrap();
        let pl = PiecewiseLinear1D::smoothed_score(&ts, 0.01, 0.12).unwrap();
        assert_eq!(pl.breaks().len(), 6);
        for i in 0..400 {
            let x = -2.0 + 0.01 * i as f64;
            let want = crate::scorefield::smoothed_pl_esf(x, 0.01, 0.12, &ts).unwrap();
            assert_relative_eq!(pl.eval(x), want, epsilon = 1e-9, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_jumps() {
        let r = PiecewiseLinear1D::new(
            alloc::vec![0.0],
            alloc::vec![1.0, 1.0],
            alloc::vec![0.0, 1.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn absolute_value() {
        let abs = PiecewiseLinear1D::new(
            alloc::vec![0.0],
            alloc::vec![-1.0, 1.0],
            alloc::vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(abs.slope_jumps(), [2.0]);
        assert_eq!(abs.eval(-3.0), 3.0);
        // E|Z|² = 1
        let zero = PiecewiseLinear1D::affine(0.0, 0.0);
        assert_relative_eq!(
            abs.gaussian_sq_distance(&zero, 0.0, 1.0),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn gaussian_distance_of_affine_functions() {
        let f = PiecewiseLinear1D::affine(2.0, 1.0);
        let g = PiecewiseLinear1D::affine(0.0, 0.0);
        // E(2X + 1)² with X ~ N(0.5, 0.25) = 4(0.25 + 0.25) + 4·0.5 + 1
        assert_relative_eq!(f.gaussian_sq_distance(&g, 0.5, 0.25), 5.0, epsilon = 1e-13);
    }

    #[test]
    fn knots_roundtrip() {
        let f =
            PiecewiseLinear1D::from_knots(&[0.0, 1.0, 3.0], &[0.0, 2.0, 0.0], 0.0, -1.0).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.eval(-4.0), 0.0);
        assert_eq!(f.eval(4.0), -1.0);
        assert_eq!(f.slope_jumps(), [2.0, -3.0, 0.0]);
    }
}
