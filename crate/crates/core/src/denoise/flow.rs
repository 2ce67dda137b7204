use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_finite, Error, Result};
use crate::scorefield::{Region, SmoothingParams, TrainingSet};

fn check_times(s: f64, t: f64, sp: &SmoothingParams, ts: &TrainingSet) -> Result<(f64, f64)> {
    if !(s >= 0.0 && s <= t) {
        return Err(Error::param(
            "s",
            alloc::format!("need 0 ≤ s ≤ t, got s = {s}, t = {t}"),
        ));
    }
    let dt = sp.checked_delta(t, ts)?;
    Ok((sp.delta_at(s), dt))
}

/// `φ_{s|t}(x)`: position at time `s` of the smoothed-score trajectory that
/// passes through `x` at time `t`.
///
/// Inside the band `|x − y_k| < δ_t` the distance to the anchor shrinks like
/// `√(s/t)`; in the gap between bands the distance to the midpoint is
/// rescaled by `(h − δ_s)/(h − δ_t)`. Band edges are gap points. At `s = 0`
/// bands collapse onto their anchors.
pub fn flow_map(x: f64, s: f64, t: f64, sp: &SmoothingParams, ts: &TrainingSet) -> Result<f64> {
    check_finite("x", x)?;
    let (ds, dt) = check_times(s, t, sp, ts)?;
    Ok(flow_unchecked(x, s, t, ds, dt, ts))
}

pub(crate) fn flow_unchecked(x: f64, s: f64, t: f64, ds: f64, dt: f64, ts: &TrainingSet) -> f64 {
    if s == t {
        return x;
    }
    match ts.locate(x, dt) {
        Region::Anchor(k) => {
            let y = ts.points()[k];
            (s / t).sqrt() * (x - y) + y
        }
        Region::Gap(k) => {
            let z = ts.midpoints()[k];
            let h = ts.half_gap(k);
            (h - ds) / (h - dt) * (x - z) + z
        }
    }
}

/// [`flow_map`] on the first coordinate; the others scale by `√(s/t)`.
pub fn flow_map_multi(
    x: &[f64],
    s: f64,
    t: f64,
    sp: &SmoothingParams,
    ts: &TrainingSet,
) -> Result<Vec<f64>> {
    if x.len() != ts.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: ts.ambient_dim(),
            found: x.len(),
        });
    }
    let first = flow_map(x[0], s, t, sp, ts)?;
    let scale = if s == t { 1.0 } else { (s / t).sqrt() };
    let mut out: Vec<f64> = x.iter().map(|v| v * scale).collect();
    out[0] = first;
    Ok(out)
}

/// Inverse of `φ_{s|t}` for `s > 0`, together with `dφ_{s|t}⁻¹/dx`.
pub fn flow_inverse(
    x: f64,
    s: f64,
    t: f64,
    sp: &SmoothingParams,
    ts: &TrainingSet,
) -> Result<(f64, f64)> {
    check_finite("x", x)?;
    if s == 0.0 {
        return Err(Error::TerminalTime);
    }
    let (ds, dt) = check_times(s, t, sp, ts)?;
    Ok(inverse_unchecked(x, ds, dt, ts))
}

pub(crate) fn inverse_unchecked(x: f64, ds: f64, dt: f64, ts: &TrainingSet) -> (f64, f64) {
    match ts.locate(x, ds) {
        Region::Anchor(k) => {
            let y = ts.points()[k];
            let j = dt / ds;
            (y + j * (x - y), j)
        }
        Region::Gap(k) => {
            let z = ts.midpoints()[k];
            let h = ts.half_gap(k);
            let j = (h - dt) / (h - ds);
            (z + j * (x - z), j)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(d: usize) -> (TrainingSet, SmoothingParams) {
        (
            TrainingSet::uniform(2, 1.0, d).unwrap(),
            SmoothingParams::new(1.0).unwrap(),
        )
    }

    #[test]
    fn examples() {
        let (ts, sp) = setup(1);
        assert_relative_eq!(
            flow_map(0.5, 0.01, 0.04, &sp, &ts).unwrap(),
            0.5625,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            flow_map(0.9, 0.01, 0.04, &sp, &ts).unwrap(),
            0.95,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            flow_map(0.4, 0.0, 0.04, &sp, &ts).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_eq!(flow_map(0.9, 0.0, 0.04, &sp, &ts).unwrap(), 1.0);
        assert!(flow_map(0.0, 0.0, 1.0, &sp, &ts).is_err());
        assert!(flow_map(0.0, 0.05, 0.04, &sp, &ts).is_err());
    }

    #[test]
    fn multi_examples() {
        let (ts, sp) = setup(2);
        let v = flow_map_multi(&[0.5, 1.0], 0.01, 0.04, &sp, &ts).unwrap();
        assert_relative_eq!(v[0], 0.5625, epsilon = 1e-12);
        assert_relative_eq!(v[1], 0.5, epsilon = 1e-12);
        let v = flow_map_multi(&[0.3, 0.0], 0.02, 0.04, &sp, &ts).unwrap();
        assert_eq!(v[1], 0.0);
        assert_eq!(
            flow_map_multi(&[0.9, 0.7], 0.0, 0.04, &sp, &ts).unwrap(),
            [1.0, 0.0]
        );
    }

    #[test]
    fn inverse_undoes_forward() {
        let ts = TrainingSet::uniform(4, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(1.2).unwrap();
        for i in 0..200 {
            let x = -1.5 + 0.015 * i as f64;
            let y = flow_map(x, 0.005, 0.02, &sp, &ts).unwrap();
            let (back, j) = flow_inverse(y, 0.005, 0.02, &sp, &ts).unwrap();
            assert_relative_eq!(back, x, epsilon = 1e-12);
            assert!(j > 0.0);
        }
        assert_eq!(
            flow_inverse(0.0, 0.0, 0.02, &sp, &ts),
            Err(Error::TerminalTime)
        );
    }
}
