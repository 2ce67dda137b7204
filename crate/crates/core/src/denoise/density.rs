use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::flow::inverse_unchecked;
use crate::error::{check_time, Error, Result};
use crate::math::{ln_gaussian_pdf, log_sum_exp, normal_cdf};
use crate::scorefield::{SmoothingParams, TrainingSet};

/// A probability density on the real line.
pub trait Density1D {
    fn pdf(&self, x: f64) -> f64;

    fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    fn cdf(&self, x: f64) -> f64;

    /// Points where the density has kinks or jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<D: Density1D + ?Sized> Density1D for &D {
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        (**self).ln_pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// Tangent marginal of the noised empirical distribution: `(1/n) Σ N(y_k, t)`.
#[derive(Debug, Clone)]
pub struct NoisedEmpirical1D {
    points: Vec<f64>,
    t: f64,
}

impl NoisedEmpirical1D {
    pub fn new(ts: &TrainingSet, t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(Self {
            points: ts.points().to_vec(),
            t,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }
}

impl Density1D for NoisedEmpirical1D {
    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        let mut terms = [0.0; 16];
        let n = self.points.len();
        let ln_n = (n as f64).ln();
        if n <= terms.len() {
            for (slot, y) in terms.iter_mut().zip(&self.points) {
                *slot = ln_gaussian_pdf(x, *y, self.t);
            }
            log_sum_exp(&terms[..n]) - ln_n
        } else {
            let v: Vec<f64> = self
                .points
                .iter()
                .map(|y| ln_gaussian_pdf(x, *y, self.t))
                .collect();
            log_sum_exp(&v) - ln_n
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let sd = self.t.sqrt();
        self.points
            .iter()
            .map(|y| normal_cdf((x - y) / sd))
            .sum::<f64>()
            / self.points.len() as f64
    }
}

/// Uniform density on `[−a, a]`.
#[derive(Debug, Clone, Copy)]
pub struct UniformDensity {
    pub a: f64,
}

impl Density1D for UniformDensity {
    fn pdf(&self, x: f64) -> f64 {
        if x.abs() <= self.a {
            0.5 / self.a
        } else {
            0.0
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        ((x + self.a) / (2.0 * self.a)).clamp(0.0, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![-self.a, self.a]
    }
}

/// Law at time `s` of the smoothed-score flow started from `source` at time `t`.
///
/// `p_s(x) = p_t(φ_{s|t}⁻¹(x)) · dφ_{s|t}⁻¹/dx`; the map is increasing, so
/// the distribution function is `F_t(φ_{s|t}⁻¹(x))`.
#[derive(Debug, Clone)]
pub struct Pushforward<D> {
    source: D,
    ts: TrainingSet,
    delta_s: f64,
    delta_t: f64,
}

/// Pushforward of `source` (the law at time `t`) to time `s ∈ (0, t]`.
pub fn pushforward_density<D: Density1D>(
    s: f64,
    t: f64,
    source: D,
    sp: &SmoothingParams,
    ts: &TrainingSet,
) -> Result<Pushforward<D>> {
    if s == 0.0 {
        return Err(Error::TerminalTime);
    }
    check_time(s)?;
    if s > t {
        return Err(Error::param(
            "s",
            "target time must not exceed the source time",
        ));
    }
    let delta_t = sp.checked_delta(t, ts)?;
    Ok(Pushforward {
        source,
        ts: ts.clone(),
        delta_s: sp.delta_at(s),
        delta_t,
    })
}

impl<D: Density1D> Density1D for Pushforward<D> {
    fn pdf(&self, x: f64) -> f64 {
        let (xt, j) = inverse_unchecked(x, self.delta_s, self.delta_t, &self.ts);
        self.source.pdf(xt) * j
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        let (xt, j) = inverse_unchecked(x, self.delta_s, self.delta_t, &self.ts);
        self.source.ln_pdf(xt) + j.ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        let (xt, _) = inverse_unchecked(x, self.delta_s, self.delta_t, &self.ts);
        self.source.cdf(xt)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.ts
            .points()
            .iter()
            .flat_map(|y| [y - self.delta_s, y + self.delta_s])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::integrate_with_breaks;
    use approx::assert_relative_eq;

    #[test]
    fn noised_empirical_density() {
        let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
        let p = NoisedEmpirical1D::new(&ts, 0.1).unwrap();
        let want = 0.5
            * (crate::math::gaussian_pdf(0.3, -1.0, 0.1)
                + crate::math::gaussian_pdf(0.3, 1.0, 0.1));
        assert_relative_eq!(p.pdf(0.3), want, max_relative = 1e-13);
        assert_relative_eq!(p.cdf(0.0), 0.5, epsilon = 1e-15);
        // far tail stays finite in log space
        assert!(p.ln_pdf(40.0).is_finite());
    }

    #[test]
    fn pushforward_identity_and_mass() {
        let ts = TrainingSet::uniform(4, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(1.2).unwrap();
        let src = NoisedEmpirical1D::new(&ts, 0.02).unwrap();
        let same = pushforward_density(0.02, 0.02, &src, &sp, &ts).unwrap();
        for x in [-1.2, -0.5, 0.0, 0.33, 0.9] {
            assert_eq!(same.pdf(x), src.pdf(x));
        }
        let p = pushforward_density(0.005, 0.02, &src, &sp, &ts).unwrap();
        let mass = integrate_with_breaks(|x| p.pdf(x), -3.0, 3.0, &p.breakpoints(), 1e-9);
        assert_relative_eq!(mass, 1.0, epsilon = 1e-6);
        assert!(matches!(
            pushforward_density(0.0, 0.02, &src, &sp, &ts),
            Err(Error::TerminalTime)
        ));
    }
}
