use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::training_set::{Region, SmoothingParams, TrainingSet};
use crate::error::{check_finite, check_time, Error, Result};
use crate::PointCloud;

/// Default clipping threshold is `DEFAULT_CLIP_SCALE / t`.
pub const DEFAULT_CLIP_SCALE: f64 = 10.0;

pub fn default_clip_norm(t: f64) -> f64 {
    DEFAULT_CLIP_SCALE / t
}

fn check_x(x: f64) -> Result<()> {
    check_finite("x", x)
}

/// Posterior mean `x̂_t(x) = Σ y_k w_k(x)` with `w_k ∝ exp(−(x − y_k)²/2t)`.
///
/// The exponents are shifted by their maximum so nothing underflows even at
/// `t = 10⁻⁸`.
pub fn posterior_mean(x: f64, t: f64, ts: &TrainingSet) -> Result<f64> {
    check_x(x)?;
    check_time(t)?;
    Ok(posterior_mean_unchecked(x, t, ts.points()))
}

pub(crate) fn posterior_mean_unchecked(x: f64, t: f64, points: &[f64]) -> f64 {
    let inv = 0.5 / t;
    let mut max = f64::NEG_INFINITY;
    for y in points {
        let e = -(x - y) * (x - y) * inv;
        if e > max {
            max = e;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for y in points {
        let w = (-(x - y) * (x - y) * inv - max).exp();
        num += w * y;
        den += w;
    }
    num / den
}

/// Empirical score `(x̂_t(x) − x)/t`.
pub fn esf_1d(x: f64, t: f64, ts: &TrainingSet) -> Result<f64> {
    Ok((posterior_mean(x, t, ts)? - x) / t)
}

/// Piecewise-linear empirical score `(y_{k*} − x)/t`, `k*` the Voronoi cell of `x`.
pub fn pl_esf(x: f64, t: f64, ts: &TrainingSet) -> Result<f64> {
    check_x(x)?;
    check_time(t)?;
    Ok((ts.points()[ts.nearest(x)] - x) / t)
}

/// Smoothed piecewise-linear score `ŝ_{t,δ}`.
///
/// Slope `−1/t` on the anchor bands, `δ/((h − δ)t)` across the gap between
/// them, where `h` is the half gap of that cell.
pub fn smoothed_pl_esf(x: f64, t: f64, delta: f64, ts: &TrainingSet) -> Result<f64> {
    check_x(x)?;
    check_time(t)?;
    if !(delta > 0.0 && delta < ts.half_spacing()) {
        return Err(Error::param(
            "delta",
            alloc::format!("must lie in (0, {}), got {delta}", ts.half_spacing()),
        ));
    }
    Ok(smoothed_unchecked(x, t, delta, ts))
}

pub(crate) fn smoothed_unchecked(x: f64, t: f64, delta: f64, ts: &TrainingSet) -> f64 {
    match ts.locate(x, delta) {
        Region::Anchor(k) => (ts.points()[k] - x) / t,
        Region::Gap(k) => {
            let h = ts.half_gap(k);
            delta / (h - delta) * (x - ts.midpoints()[k]) / t
        }
    }
}

fn check_dim(x: &[f64], ts: &TrainingSet) -> Result<()> {
    if x.len() != ts.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: ts.ambient_dim(),
            found: x.len(),
        });
    }
    for v in x {
        check_x(*v)?;
    }
    Ok(())
}

fn normal_part(x: &[f64], t: f64, out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(x).skip(1) {
        *o = -v / t;
    }
}

/// Empirical score in ℝᵈ: tangent coordinate from [`esf_1d`], normal ones `−x_i/t`.
pub fn esf_multi(x: &[f64], t: f64, ts: &TrainingSet) -> Result<Vec<f64>> {
    check_dim(x, ts)?;
    let mut out = alloc::vec![0.0; x.len()];
    out[0] = esf_1d(x[0], t, ts)?;
    normal_part(x, t, &mut out);
    Ok(out)
}

/// Smoothed score in ℝᵈ with `δ = δ_t`.
pub fn smoothed_multi(
    x: &[f64],
    t: f64,
    sp: &SmoothingParams,
    ts: &TrainingSet,
) -> Result<Vec<f64>> {
    check_dim(x, ts)?;
    check_time(t)?;
    let delta = sp.checked_delta(t, ts)?;
    let mut out = alloc::vec![0.0; x.len()];
    out[0] = smoothed_unchecked(x[0], t, delta, ts);
    normal_part(x, t, &mut out);
    Ok(out)
}

/// Empirical score of an arbitrary point set in ℝᵈ, written into `out`.
pub fn esf_points(x: &[f64], t: f64, anchors: &PointCloud, out: &mut [f64]) -> Result<()> {
    if x.len() != anchors.dim() || out.len() != anchors.dim() {
        return Err(Error::DimensionMismatch {
            expected: anchors.dim(),
            found: x.len().min(out.len()),
        });
    }
    check_time(t)?;
    esf_points_unchecked(x, t, anchors, out);
    Ok(())
}

pub(crate) fn esf_points_unchecked(x: &[f64], t: f64, anchors: &PointCloud, out: &mut [f64]) {
    let inv = 0.5 / t;
    let sq = |p: &[f64]| -> f64 { p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum() };
    let max = anchors
        .iter()
        .map(|p| -sq(p) * inv)
        .fold(f64::NEG_INFINITY, f64::max);
    out.iter_mut().for_each(|o| *o = 0.0);
    let mut den = 0.0;
    for p in anchors.iter() {
        let w = (-sq(p) * inv - max).exp();
        den += w;
        for (o, c) in out.iter_mut().zip(p) {
            *o += w * c;
        }
    }
    for (o, xi) in out.iter_mut().zip(x) {
        *o = (*o / den - xi) / t;
    }
}

/// `s` rescaled to norm `max_norm` when it is longer than that.
pub fn clip_score(s: &[f64], max_norm: f64) -> Vec<f64> {
    let mut v = s.to_vec();
    clip_in_place(&mut v, max_norm);
    v
}

pub fn clip_in_place(s: &mut [f64], max_norm: f64) {
    let norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        s.iter_mut().for_each(|v| *v *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two() -> TrainingSet {
        TrainingSet::uniform(2, 1.0, 1).unwrap()
    }

    #[test]
    fn posterior_mean_examples() {
        let ts = two();
        assert_eq!(posterior_mean(0.0, 0.1, &ts).unwrap(), 0.0);
        assert_relative_eq!(
            posterior_mean(0.5, 0.25, &ts).unwrap(),
            2.0f64.tanh(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            posterior_mean(0.5, 0.25, &ts).unwrap(),
            0.964_027_580_075_817,
            epsilon = 1e-12
        );
        assert!((posterior_mean(0.5, 1e-4, &ts).unwrap() - 1.0).abs() < 1e-10);
        assert!(posterior_mean(f64::NAN, 0.1, &ts).is_err());
        assert!(posterior_mean(0.0, 0.0, &ts).is_err());
        assert!(posterior_mean(0.0, -1.0, &ts).is_err());
    }

    #[test]
    fn esf_examples() {
        let ts = two();
        assert_eq!(esf_1d(0.0, 0.05, &ts).unwrap(), 0.0);
        assert_relative_eq!(
            esf_1d(0.5, 0.25, &ts).unwrap(),
            1.856_110_320_303_268,
            epsilon = 1e-12
        );
        let v = esf_1d(1.0, 0.01, &ts).unwrap();
        assert!(v.abs() <= (-1.0f64 / 0.01).exp() * 2.0 / 0.01);
    }

    #[test]
    fn pl_esf_examples() {
        let ts = two();
        assert_relative_eq!(pl_esf(0.3, 0.1, &ts).unwrap(), 7.0, epsilon = 1e-12);
        assert_relative_eq!(pl_esf(0.0, 0.1, &ts).unwrap(), -10.0, epsilon = 1e-12);
        let three = TrainingSet::uniform(3, 1.0, 1).unwrap();
        assert_relative_eq!(pl_esf(-0.6, 0.04, &three).unwrap(), -10.0, epsilon = 1e-12);
    }

    #[test]
    fn smoothed_examples() {
        let ts = two();
        assert_eq!(smoothed_pl_esf(0.0, 0.04, 0.2, &ts).unwrap(), 0.0);
        assert_relative_eq!(
            smoothed_pl_esf(0.5, 0.04, 0.2, &ts).unwrap(),
            3.125,
            epsilon = 1e-12
        );
        let at = smoothed_pl_esf(0.8, 0.04, 0.2, &ts).unwrap();
        let band = (1.0 - 0.8) / 0.04;
        let gap = 0.2 / 0.8 * 0.8 / 0.04;
        assert_relative_eq!(at, 5.0, epsilon = 1e-12);
        assert_relative_eq!(band, gap, epsilon = 1e-12);
        assert!(smoothed_pl_esf(0.0, 0.04, 1.0, &ts).is_err());
        assert!(smoothed_pl_esf(0.0, 0.04, 0.0, &ts).is_err());
    }

    #[test]
    fn multi_examples() {
        let ts = TrainingSet::uniform(2, 1.0, 2).unwrap();
        let v = esf_multi(&[0.0, 0.3], 0.1, &ts).unwrap();
        assert_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], -3.0, epsilon = 1e-12);
        let v = esf_multi(&[0.5, -0.2], 0.25, &ts).unwrap();
        assert_relative_eq!(v[0], 1.856_110_320_303_268, epsilon = 1e-12);
        assert_relative_eq!(v[1], 0.8, epsilon = 1e-12);
        let v = esf_multi(&[1.0, 0.0], 1e-3, &ts).unwrap();
        assert!(v[0].abs() < 1e-12 && v[1] == 0.0);
        assert!(matches!(
            esf_multi(&[0.0], 0.1, &ts),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));

        let sp = SmoothingParams::new(1.0).unwrap();
        let v = smoothed_multi(&[0.0, 1.0], 0.04, &sp, &ts).unwrap();
        assert_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], -25.0, epsilon = 1e-12);
        let v = smoothed_multi(&[0.5, 0.0], 0.04, &sp, &ts).unwrap();
        assert_relative_eq!(v[0], 3.125, epsilon = 1e-12);
        assert_eq!(v[1], 0.0);
        assert!(smoothed_multi(&[0.0, 0.0], 1.5, &sp, &ts).is_err());
    }

    #[test]
    fn point_set_score_matches_axis_case() {
        let ts = TrainingSet::uniform(4, 1.0, 2).unwrap();
        let anchors = ts.anchors();
        let mut out = [0.0; 2];
        for &(x, y, t) in &[(0.1, 0.2, 0.01), (-0.7, 0.0, 1e-4), (3.0, -1.0, 0.3)] {
            esf_points(&[x, y], t, &anchors, &mut out).unwrap();
            let want = esf_multi(&[x, y], t, &ts).unwrap();
            assert_relative_eq!(out[0], want[0], max_relative = 1e-12);
            assert_relative_eq!(out[1], want[1], max_relative = 1e-12);
        }
    }

    #[test]
    fn clip_examples() {
        assert_eq!(clip_score(&[3.0, 4.0], 10.0), [3.0, 4.0]);
        assert_eq!(clip_score(&[3.0, 4.0], 5.0), [3.0, 4.0]);
        let v = clip_score(&[6.0, 8.0], 5.0);
        assert_relative_eq!(v[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(v[1], 4.0, epsilon = 1e-12);
        assert_eq!(default_clip_norm(0.1), 100.0);
    }

    #[test]
    fn nonuniform_smoothing_is_continuous() {
        let ts = TrainingSet::from_points(alloc::vec![-1.0, -0.2, 0.5, 1.0], 1).unwrap();
        let delta = 0.9 * ts.half_spacing();
        for (k, y) in ts.points().iter().enumerate() {
            for edge in [y - delta, y + delta] {
                let l = smoothed_pl_esf(edge - 1e-12, 0.01, delta, &ts).unwrap();
                let r = smoothed_pl_esf(edge + 1e-12, 0.01, delta, &ts).unwrap();
                assert!((l - r).abs() < 1e-7, "jump at anchor {k}: {l} vs {r}");
            }
        }
    }
}
