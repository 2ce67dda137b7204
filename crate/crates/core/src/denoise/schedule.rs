use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Time grid from `t0` down to `t_min`, uniform in `σ^{1/ρ}` with `σ = √t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSchedule {
    pub t0: f64,
    pub t_min: f64,
    /// Number of grid points, so `steps − 1` Euler steps.
    pub steps: usize,
    pub rho: f64,
}

impl NoiseSchedule {
    pub fn new(t0: f64, t_min: f64, steps: usize, rho: f64) -> Result<Self> {
        let s = Self {
            t0,
            t_min,
            steps,
            rho,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t0 && self.t0.is_finite()) {
            return Err(Error::param("schedule", "need 0 < t_min < t0"));
        }
        if self.steps < 2 {
            return Err(Error::param("steps", "need at least two grid points"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::param("rho", "must be positive"));
        }
        Ok(())
    }

    /// `t_0 > t_1 > … > t_{N−1}`, with both ends exact.
    pub fn times(&self) -> Vec<f64> {
        let inv = 1.0 / self.rho;
        let a = self.t0.sqrt().powf(inv);
        let b = self.t_min.sqrt().powf(inv);
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    self.t0
                } else if i == last {
                    self.t_min
                } else {
                    let sigma = (a + (i as f64 / last as f64) * (b - a)).powf(self.rho);
                    sigma * sigma
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_shape() {
        let s = NoiseSchedule::new(0.02, 1e-5, 200, 2.0).unwrap();
        let ts = s.times();
        assert_eq!(ts.len(), 200);
        assert_eq!(ts[0], 0.02);
        assert_eq!(ts[199], 1e-5);
        assert!(ts.windows(2).all(|w| w[1] < w[0]));
        // ρ = 2: σ^{1/2} is linear in i
        let q: alloc::vec::Vec<f64> = ts.iter().map(|t| t.powf(0.25)).collect();
        assert_relative_eq!(q[1] - q[0], q[100] - q[99], max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(NoiseSchedule::new(0.02, 0.03, 200, 2.0).is_err());
        assert!(NoiseSchedule::new(0.02, 0.0, 200, 2.0).is_err());
        assert!(NoiseSchedule::new(0.02, 1e-5, 1, 2.0).is_err());
        assert!(NoiseSchedule::new(0.02, 1e-5, 10, 0.0).is_err());
    }
}
