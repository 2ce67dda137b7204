use crate::math::integrate_with_breaks;
#[allow(unused_imports)]
use num_traits::Float;

use super::density::Density1D;

/// Absolute tolerance of the KL quadrature.
pub const KL_TOLERANCE: f64 = 1e-6;

/// `KL(u_a ‖ p) = −ln(2a) − (1/2a) ∫_{−a}^{a} ln p(x) dx` for `u_a` uniform on `[−a, a]`.
///
/// `ln_p` may be an unnormalized log-density, in which case the result is the
/// divergence against that measure. Returns `+∞` when `p` vanishes somewhere inside.
pub fn kl_uniform(ln_p: impl Fn(f64) -> f64, a: f64, breaks: &[f64]) -> f64 {
    let mut hit_zero = false;
    let integral = integrate_with_breaks(
        |x| {
            let v = ln_p(x);
            if v == f64::NEG_INFINITY {
                hit_zero = true;
                0.0
            } else {
                v
            }
        },
        -a,
        a,
        breaks,
        KL_TOLERANCE,
    );
    if hit_zero {
        return f64::INFINITY;
    }
    -(2.0 * a).ln() - integral / (2.0 * a)
}

/// Convenience wrapper of [`kl_uniform`] for a [`Density1D`].
pub fn kl_uniform_density<D: Density1D>(p: &D, a: f64) -> f64 {
    kl_uniform(|x| p.ln_pdf(x), a, &p.breakpoints())
}

/// Upper bound `1/(3t₀(1 − κ√t₀)) + ln(√t₀/(1 − κ√t₀)) + ln(2√(2π))` on the
/// divergence between `u_1` and the terminal law for two anchors at ±1.
pub fn kl_bound(t0: f64, kappa: f64) -> f64 {
    let c = 1.0 - kappa * t0.sqrt();
    1.0 / (3.0 * t0 * c) + (t0.sqrt() / c).ln() + (2.0 * crate::math::SQRT_2PI).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::UniformDensity;
    use approx::assert_relative_eq;

    #[test]
    fn identical_distributions() {
        let u = UniformDensity { a: 0.7 };
        assert_relative_eq!(kl_uniform_density(&u, 0.7), 0.0, epsilon = 1e-12);
        assert_eq!(
            kl_uniform(|x| if x > 0.1 { f64::NEG_INFINITY } else { 0.0 }, 1.0, &[]),
            f64::INFINITY
        );
    }

    #[test]
    fn bound_value() {
        let c: f64 = 1.0 - 0.02f64.sqrt();
        let want = 1.0 / (0.06 * c)
            + (0.02f64.sqrt() / c).ln()
            + (2.0 * (2.0 * core::f64::consts::PI).sqrt()).ln();
        assert_relative_eq!(kl_bound(0.02, 1.0), want, epsilon = 1e-12);
    }
}
