use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::density::Density1D;
use crate::error::Result;
use crate::scorefield::{SmoothingParams, TrainingSet};

/// Law of the smoothed-score flow at `s = 0`: atoms `a_k` at the anchors plus
/// an absolutely continuous part supported on `[y_1, y_n]`.
#[derive(Debug, Clone)]
pub struct TerminalDecomposition<D> {
    source: D,
    ts: TrainingSet,
    delta: f64,
    atom_weights: Vec<f64>,
    smooth_mass: f64,
}

/// Splits the `s = 0` law of the flow started from `source` at time `t`.
///
/// The atom at `y_k` collects the source mass of its band (`x ≤ y_1 + δ_t`
/// for the first anchor, `x ≥ y_n − δ_t` for the last, `|x − y_k| ≤ δ_t`
/// otherwise); the gaps are stretched linearly onto `[y_k, y_{k+1}]`.
pub fn terminal_decomposition<D: Density1D>(
    t: f64,
    source: D,
    sp: &SmoothingParams,
    ts: &TrainingSet,
) -> Result<TerminalDecomposition<D>> {
    crate::error::check_time(t)?;
    let delta = sp.checked_delta(t, ts)?;
    let y = ts.points();
    let n = y.len();
    let atom_weights: Vec<f64> = (0..n)
        .map(|k| {
            let hi = if k + 1 == n {
                1.0
            } else {
                source.cdf(y[k] + delta)
            };
            let lo = if k == 0 {
                0.0
            } else {
                source.cdf(y[k] - delta)
            };
            hi - lo
        })
        .collect();
    let smooth_mass = (0..n - 1)
        .map(|k| source.cdf(y[k + 1] - delta) - source.cdf(y[k] + delta))
        .sum();
    Ok(TerminalDecomposition {
        source,
        ts: ts.clone(),
        delta,
        atom_weights,
        smooth_mass,
    })
}

impl<D: Density1D> TerminalDecomposition<D> {
    pub fn atom_weights(&self) -> &[f64] {
        &self.atom_weights
    }

    /// Mass of the absolutely continuous part, `1 − Σ a_k`.
    pub fn smooth_mass(&self) -> f64 {
        self.smooth_mass
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Gap index and source-time position of a terminal point in `[y_1, y_n]`;
    /// anchors take the limit from their left gap (from the right at `y_1`).
    fn source_point(&self, x: f64) -> Option<(usize, f64, f64)> {
        let y = self.ts.points();
        if !(x >= y[0] && x <= y[y.len() - 1]) {
            return None;
        }
        let k = y.partition_point(|p| *p < x).saturating_sub(1);
        let h = self.ts.half_gap(k);
        let z = self.ts.midpoints()[k];
        let j = (h - self.delta) / h;
        Some((k, z + j * (x - z), j))
    }

    /// Density of the absolutely continuous part (total mass [`smooth_mass`](Self::smooth_mass)).
    pub fn continuous_part(&self, x: f64) -> f64 {
        match self.source_point(x) {
            Some((_, xt, j)) => j * self.source.pdf(xt),
            None => 0.0,
        }
    }

    pub fn ln_continuous_part(&self, x: f64) -> f64 {
        match self.source_point(x) {
            Some((_, xt, j)) => j.ln() + self.source.ln_pdf(xt),
            None => f64::NEG_INFINITY,
        }
    }

    /// `p̃_0`: the continuous part normalized to a probability density.
    pub fn smooth_part(&self, x: f64) -> f64 {
        self.continuous_part(x) / self.smooth_mass
    }

    /// `∫_{−∞}^x` of the continuous part.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        let y = self.ts.points();
        let n = y.len();
        let mut acc = 0.0;
        for k in 0..n - 1 {
            let lo = self.source.cdf(y[k] + self.delta);
            if x >= y[k + 1] {
                acc += self.source.cdf(y[k + 1] - self.delta) - lo;
            } else {
                if x > y[k] {
                    let (_, xt, _) = self.source_point(x).expect("inside the hull");
                    acc += self.source.cdf(xt) - lo;
                }
                break;
            }
        }
        acc
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.ts.points().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::NoisedEmpirical1D;
    use crate::math::{integrate_with_breaks, normal_sf};
    use approx::assert_relative_eq;

    #[test]
    fn two_anchor_split() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(1.2).unwrap();
        let t0 = 0.02;
        let src = NoisedEmpirical1D::new(&ts, t0).unwrap();
        let dec = terminal_decomposition(t0, &src, &sp, &ts).unwrap();
        let a = dec.atom_weights();
        assert_relative_eq!(a[0], a[1], epsilon = 1e-15);
        let delta = 1.2 * t0.sqrt();
        let sd = t0.sqrt();
        let tail =
            0.5 * (normal_sf((1.0 - delta - 1.0) / sd) + normal_sf((1.0 - delta + 1.0) / sd));
        assert_relative_eq!(a[1], tail, max_relative = 1e-12);
        assert_relative_eq!(a[0] + a[1] + dec.smooth_mass(), 1.0, epsilon = 1e-12);
        let mass = integrate_with_breaks(|x| dec.continuous_part(x), -1.0, 1.0, &[0.0], 1e-10);
        assert_relative_eq!(mass, dec.smooth_mass(), epsilon = 1e-8);
        assert_relative_eq!(dec.continuous_cdf(1.0), dec.smooth_mass(), epsilon = 1e-14);
        assert_eq!(dec.smooth_part(1.2), 0.0);
        assert!(dec.smooth_part(0.999) > 0.0 && dec.smooth_part(-0.999) > 0.0);
    }

    #[test]
    fn atoms_do_not_depend_on_the_reference_time() {
        let ts = TrainingSet::uniform(4, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(1.2).unwrap();
        let t0 = 0.02;
        let src = NoisedEmpirical1D::new(&ts, t0).unwrap();
        let at_t0 = terminal_decomposition(t0, &src, &sp, &ts).unwrap();
        let s = t0 / 4.0;
        let moved = crate::denoise::pushforward_density(s, t0, &src, &sp, &ts).unwrap();
        let at_s = terminal_decomposition(s, &moved, &sp, &ts).unwrap();
        for (a, b) in at_t0.atom_weights().iter().zip(at_s.atom_weights()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        for x in [-0.9, -0.2, 0.1, 0.5, 0.95] {
            assert_relative_eq!(
                at_t0.continuous_part(x),
                at_s.continuous_part(x),
                max_relative = 1e-9
            );
        }
    }
}
