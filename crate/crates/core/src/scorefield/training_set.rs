use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_time, Error, Result};

/// Anchor points `y_1 < … < y_n` on the first axis of ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingSet {
    points: Vec<f64>,
    midpoints: Vec<f64>,
    ambient_dim: usize,
    half_width: f64,
    half_spacing: f64,
    uniform: bool,
}

/// Where a point sits relative to the smoothing bands of width `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inside the band around anchor `k` (the end bands are unbounded).
    Anchor(usize),
    /// In the open gap between the bands of anchors `k` and `k + 1`.
    /// Band boundaries count as gap points.
    Gap(usize),
}

impl TrainingSet {
    /// `n` anchors spaced uniformly on `[−D, D]`: `y_k = 2(k−1)Δ − D`, `Δ = D/(n−1)`.
    pub fn uniform(n: usize, half_width: f64, ambient_dim: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTrainingSet(
                "need at least two anchors".into(),
            ));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("half_width", "must be positive and finite"));
        }
        if ambient_dim == 0 {
            return Err(Error::param("ambient_dim", "must be at least 1"));
        }
        let delta = half_width / (n - 1) as f64;
        let points: Vec<f64> = (0..n)
            .map(|k| 2.0 * k as f64 * delta - half_width)
            .collect();
        let midpoints = points[..n - 1].iter().map(|y| y + delta).collect();
        Ok(Self {
            points,
            midpoints,
            ambient_dim,
            half_width,
            half_spacing: delta,
            uniform: true,
        })
    }

    /// Arbitrary strictly increasing anchors.
    ///
    /// `half_spacing` is the smallest half gap, which bounds the admissible
    /// smoothing width; `half_width` is half the span.
    pub fn from_points(points: Vec<f64>, ambient_dim: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTrainingSet(
                "need at least two anchors".into(),
            ));
        }
        if ambient_dim == 0 {
            return Err(Error::param("ambient_dim", "must be at least 1"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidTrainingSet("anchors must be finite".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTrainingSet(
                "anchors must be strictly increasing".into(),
            ));
        }
        let midpoints: Vec<f64> = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let half_spacing = points
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]))
            .fold(f64::INFINITY, f64::min);
        let half_width = 0.5 * (points[points.len() - 1] - points[0]);
        Ok(Self {
            points,
            midpoints,
            ambient_dim,
            half_width,
            half_spacing,
            uniform: false,
        })
    }

    /// Same anchors embedded in a different ambient dimension.
    pub fn with_ambient_dim(&self, ambient_dim: usize) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::param("ambient_dim", "must be at least 1"));
        }
        Ok(Self {
            ambient_dim,
            ..self.clone()
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// `D`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `Δ`; the smallest half gap for non-uniform sets.
    pub fn half_spacing(&self) -> f64 {
        self.half_spacing
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Half of `y_{k+1} − y_k`.
    pub fn half_gap(&self, k: usize) -> f64 {
        if self.uniform {
            self.half_spacing
        } else {
            self.midpoints[k] - self.points[k]
        }
    }

    /// Index of the Voronoi cell holding `x`; a point on a midpoint goes to the left cell.
    pub fn nearest(&self, x: f64) -> usize {
        self.midpoints.partition_point(|z| *z < x)
    }

    /// Region of `x` for band width `delta`.
    pub fn locate(&self, x: f64, delta: f64) -> Region {
        let k = self.nearest(x);
        let y = self.points[k];
        let last = self.points.len() - 1;
        if (x - y).abs() < delta || (k == 0 && x < y) || (k == last && x > y) {
            Region::Anchor(k)
        } else if x > y {
            Region::Gap(k)
        } else {
            Region::Gap(k - 1)
        }
    }

    /// `(x, 0, …, 0)` in the ambient space.
    pub fn embed(&self, x: f64) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.ambient_dim];
        v[0] = x;
        v
    }

    /// The anchors as points of ℝᵈ.
    pub fn anchors(&self) -> crate::PointCloud {
        crate::PointCloud::from_rows(self.ambient_dim, self.points.iter().map(|y| self.embed(*y)))
    }
}

/// `δ_t = κ√t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothingParams {
    pub kappa: f64,
}

impl SmoothingParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::param("kappa", "must be positive and finite"));
        }
        Ok(Self { kappa })
    }

    pub fn delta_at(&self, t: f64) -> f64 {
        self.kappa * t.max(0.0).sqrt()
    }

    /// Upper end of the window `t < (Δ/κ)²` where `δ_t < Δ`.
    pub fn max_time(&self, ts: &TrainingSet) -> f64 {
        let r = ts.half_spacing() / self.kappa;
        r * r
    }

    /// `δ_t`, after checking `0 ≤ t` and `δ_t < Δ`.
    pub fn checked_delta(&self, t: f64, ts: &TrainingSet) -> Result<f64> {
        if t != 0.0 {
            check_time(t)?;
        }
        let delta = self.delta_at(t);
        if delta >= ts.half_spacing() {
            return Err(Error::OutsideValidityWindow {
                t,
                limit: self.max_time(ts),
            });
        }
        Ok(delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_layout() {
        let ts = TrainingSet::uniform(4, 1.0, 2).unwrap();
        let d = 1.0 / 3.0;
        assert_eq!(ts.half_spacing(), d);
        for (k, y) in ts.points().iter().enumerate() {
            assert_eq!(*y, 2.0 * k as f64 * d - 1.0);
        }
        for (z, y) in ts.midpoints().iter().zip(ts.points()) {
            assert_eq!(*z, y + d);
        }
        assert_eq!(ts.anchors().point(3), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(TrainingSet::uniform(1, 1.0, 1).is_err());
        assert!(TrainingSet::from_points(alloc::vec![0.0, 0.0], 1).is_err());
        assert!(TrainingSet::from_points(alloc::vec![1.0, 0.0], 1).is_err());
        assert!(TrainingSet::uniform(2, 1.0, 0).is_err());
    }

    #[test]
    fn voronoi_ties_go_left() {
        let ts = TrainingSet::uniform(3, 1.0, 1).unwrap();
        assert_eq!(ts.nearest(-0.5), 0);
        assert_eq!(ts.nearest(-0.49), 1);
        assert_eq!(ts.nearest(0.5), 1);
        assert_eq!(ts.nearest(7.0), 2);
    }

    #[test]
    fn regions() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        assert_eq!(ts.locate(0.0, 0.2), Region::Gap(0));
        assert_eq!(ts.locate(0.9, 0.2), Region::Anchor(1));
        assert_eq!(ts.locate(5.0, 0.2), Region::Anchor(1));
        assert_eq!(ts.locate(-1.5, 0.2), Region::Anchor(0));
        // band edges belong to the gap
        assert_eq!(ts.locate(0.75, 0.25), Region::Gap(0));
        assert_eq!(ts.locate(-0.75, 0.25), Region::Gap(0));
    }

    #[test]
    fn validity_window() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(1.0).unwrap();
        assert_eq!(sp.max_time(&ts), 1.0);
        assert!(sp.checked_delta(0.04, &ts).is_ok());
        assert!(matches!(
            sp.checked_delta(1.0, &ts),
            Err(Error::OutsideValidityWindow { .. })
        ));
        assert!(SmoothingParams::new(0.0).is_err());
    }
}
