use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// AdamW with decoupled weight decay.
///
/// Each step first shrinks the decayed parameters by `1 − lr·λ`, then applies
/// the bias-corrected Adam update.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamW {
    pub fn new(n_params: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: alloc::vec![0.0; n_params],
            v: alloc::vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update; `decay_mask[i]` selects which parameters receive weight decay.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        lr: f64,
        weight_decay: f64,
        decay_mask: &[bool],
    ) -> Result<()> {
        let n = self.m.len();
        if params.len() != n || grads.len() != n || decay_mask.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: params.len().min(grads.len()).min(decay_mask.len()),
            });
        }
        if let Some(index) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient {
                step: self.step as usize,
                index,
            });
        }
        self.step += 1;
        let k = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(k);
        let c2 = 1.0 - self.beta2.powi(k);
        let shrink = 1.0 - lr * weight_decay;
        for i in 0..n {
            if decay_mask[i] {
                params[i] *= shrink;
            }
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_without_decay_is_a_no_op() {
        let mut p = [1.0, -2.0, 3.0];
        let mut opt = AdamW::new(3);
        opt.step(&mut p, &[0.0; 3], 0.1, 0.0, &[true; 3]).unwrap();
        assert_eq!(p, [1.0, -2.0, 3.0]);
    }

    #[test]
    fn decay_shrinks_only_masked_parameters() {
        let mut p = [1.0, -2.0, 3.0];
        let mut opt = AdamW::new(3);
        opt.step(&mut p, &[0.0; 3], 0.1, 2.0, &[true, false, true])
            .unwrap();
        assert_eq!(p, [0.8, -2.0, 3.0 * 0.8]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = [0.0, 0.0];
        let mut opt = AdamW::new(2);
        opt.step(&mut p, &[3.0, -0.5], 0.01, 0.0, &[false; 2])
            .unwrap();
        assert!((p[0] + 0.01).abs() < 1e-9 && (p[1] - 0.01).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_finite_gradients() {
        let mut opt = AdamW::new(2);
        let err = opt.step(&mut [0.0; 2], &[0.0, f64::NAN], 0.1, 0.0, &[false; 2]);
        assert_eq!(err, Err(Error::NonFiniteGradient { step: 0, index: 1 }));
    }
}
