use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::evaluators::{
    clip_in_place, esf_points_unchecked, posterior_mean_unchecked, smoothed_unchecked,
};
use super::training_set::{SmoothingParams, TrainingSet};
use crate::error::{check_finite, check_time, Error, Result};
use crate::PointCloud;

/// Which score family a field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FieldKind {
    Esf,
    PlEsf,
    SmoothedPl,
    Nn,
    Zero,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Esf => "esf",
            FieldKind::PlEsf => "pl-esf",
            FieldKind::SmoothedPl => "smoothed-pl",
            FieldKind::Nn => "nn",
            FieldKind::Zero => "zero",
        }
    }
}

impl core::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A time-dependent vector field `(x, t) ↦ s_t(x)` on ℝᵈ.
///
/// Implementations are pure: the same input always yields the same output.
pub trait ScoreField: Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> FieldKind;

    /// Writes `s_t(x)` into `out`; `x` and `out` both have length [`dim`](Self::dim).
    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()>;

    fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.dim()];
        self.eval_into(x, t, &mut out)?;
        Ok(out)
    }

    /// Evaluates a row-major batch of points that share the same time.
    fn eval_batch(&self, xs: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        if xs.len() != out.len() || xs.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                found: out.len(),
            });
        }
        for (x, o) in xs.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            self.eval_into(x, t, o)?;
        }
        Ok(())
    }
}

fn check_io(dim: usize, x: &[f64], out: &[f64], t: f64) -> Result<()> {
    if x.len() != dim || out.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if x.len() != dim { x.len() } else { out.len() },
        });
    }
    check_time(t)?;
    for v in x {
        check_finite("x", *v)?;
    }
    Ok(())
}

fn normal_part(x: &[f64], t: f64, out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(x).skip(1) {
        *o = -v / t;
    }
}

/// The empirical score of a training set, optionally clipped to norm `scale/t`.
#[derive(Debug, Clone)]
pub struct EmpiricalScore {
    ts: TrainingSet,
    clip_scale: Option<f64>,
}

impl EmpiricalScore {
    pub fn new(ts: TrainingSet) -> Self {
        Self {
            ts,
            clip_scale: None,
        }
    }

    /// Clip to norm `scale / t`.
    pub fn clipped(ts: TrainingSet, scale: f64) -> Self {
        Self {
            ts,
            clip_scale: Some(scale),
        }
    }

    pub fn training_set(&self) -> &TrainingSet {
        &self.ts
    }
}

impl ScoreField for EmpiricalScore {
    fn dim(&self) -> usize {
        self.ts.ambient_dim()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Esf
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_io(self.dim(), x, out, t)?;
        out[0] = (posterior_mean_unchecked(x[0], t, self.ts.points()) - x[0]) / t;
        normal_part(x, t, out);
        if let Some(scale) = self.clip_scale {
            clip_in_place(out, scale / t);
        }
        Ok(())
    }
}

/// The piecewise-linear empirical score.
#[derive(Debug, Clone)]
pub struct PlScore {
    ts: TrainingSet,
}

impl PlScore {
    pub fn new(ts: TrainingSet) -> Self {
        Self { ts }
    }
}

impl ScoreField for PlScore {
    fn dim(&self) -> usize {
        self.ts.ambient_dim()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::PlEsf
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_io(self.dim(), x, out, t)?;
        out[0] = (self.ts.points()[self.ts.nearest(x[0])] - x[0]) / t;
        normal_part(x, t, out);
        Ok(())
    }
}

/// The smoothed piecewise-linear score with `δ_t = κ√t`.
#[derive(Debug, Clone)]
pub struct SmoothedScore {
    ts: TrainingSet,
    sp: SmoothingParams,
}

impl SmoothedScore {
    pub fn new(ts: TrainingSet, sp: SmoothingParams) -> Self {
        Self { ts, sp }
    }

    pub fn training_set(&self) -> &TrainingSet {
        &self.ts
    }

    pub fn params(&self) -> SmoothingParams {
        self.sp
    }
}

impl ScoreField for SmoothedScore {
    fn dim(&self) -> usize {
        self.ts.ambient_dim()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::SmoothedPl
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_io(self.dim(), x, out, t)?;
        let delta = self.sp.checked_delta(t, &self.ts)?;
        out[0] = smoothed_unchecked(x[0], t, delta, &self.ts);
        normal_part(x, t, out);
        Ok(())
    }
}

/// Empirical score of an arbitrary finite point set in ℝᵈ.
#[derive(Debug, Clone)]
pub struct PointSetScore {
    anchors: PointCloud,
    clip_scale: Option<f64>,
}

impl PointSetScore {
    pub fn new(anchors: PointCloud) -> Self {
        Self {
            anchors,
            clip_scale: None,
        }
    }

    pub fn clipped(anchors: PointCloud, scale: f64) -> Self {
        Self {
            anchors,
            clip_scale: Some(scale),
        }
    }

    pub fn anchors(&self) -> &PointCloud {
        &self.anchors
    }
}

impl ScoreField for PointSetScore {
    fn dim(&self) -> usize {
        self.anchors.dim()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Esf
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_io(self.dim(), x, out, t)?;
        esf_points_unchecked(x, t, &self.anchors, out);
        if let Some(scale) = self.clip_scale {
            clip_in_place(out, scale / t);
        }
        Ok(())
    }
}

/// `s ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField {
    pub dim: usize,
}

impl ScoreField for ZeroField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Zero
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_io(self.dim, x, out, t)?;
        out.iter_mut().for_each(|o| *o = 0.0);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorefield::{esf_multi, smoothed_multi};

    #[test]
    fn fields_agree_with_free_functions() {
        let ts = TrainingSet::uniform(4, 1.0, 3).unwrap();
        let sp = SmoothingParams::new(1.2).unwrap();
        let esf = EmpiricalScore::new(ts.clone());
        let sm = SmoothedScore::new(ts.clone(), sp);
        let x = [0.21, -0.4, 0.05];
        assert_eq!(
            esf.eval(&x, 0.01).unwrap(),
            esf_multi(&x, 0.01, &ts).unwrap()
        );
        assert_eq!(
            sm.eval(&x, 0.01).unwrap(),
            smoothed_multi(&x, 0.01, &sp, &ts).unwrap()
        );
        assert_eq!(ZeroField { dim: 3 }.eval(&x, 0.3).unwrap(), [0.0; 3]);
        assert!(esf.eval(&x[..2], 0.01).is_err());
        assert_eq!(sm.kind().name(), "smoothed-pl");
    }

    #[test]
    fn clipped_esf_respects_threshold() {
        let ts = TrainingSet::uniform(2, 1.0, 2).unwrap();
        let f = EmpiricalScore::clipped(ts, 10.0);
        let v = f.eval(&[0.0, 50.0], 0.1).unwrap();
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        assert!((norm - 100.0).abs() < 1e-9);
    }
}
