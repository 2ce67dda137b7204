#[allow(unused_imports)]
use num_traits::Float;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / SQRT_2PI
}

/// Upper tail `P[Z > u]` of the standard normal, accurate far into the tail.
#[inline]
pub fn normal_sf(u: f64) -> f64 {
    0.5 * libm::erfc(u / core::f64::consts::SQRT_2)
}

/// `P[Z <= u]` of the standard normal.
#[inline]
pub fn normal_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u / core::f64::consts::SQRT_2)
}

/// Density of `N(mean, var)` at `x`.
#[inline]
pub fn gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (SQRT_2PI * var.sqrt())
}

#[inline]
pub fn ln_gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * d * d / var - LN_SQRT_2PI - 0.5 * var.ln()
}

/// `ln Σ exp(v_i)`, shifted by the maximum. Returns `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_matches_reference_values() {
        // Q(1) and φ(1) to 7 digits.
        assert_relative_eq!(normal_sf(1.0), 0.158_655_3, epsilon = 1e-7);
        assert_relative_eq!(normal_pdf(1.0), 0.241_970_7, epsilon = 1e-7);
        assert_relative_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        // deep tail keeps relative accuracy
        assert_relative_eq!(
            normal_sf(10.0),
            7.619_853_024_160_527e-24,
            max_relative = 1e-12
        );
    }

    #[test]
    fn log_sum_exp_survives_underflow() {
        let v = [-1.0e4, -1.0e4 - 2.0_f64.ln()];
        assert_relative_eq!(log_sum_exp(&v), -1.0e4 + 1.5_f64.ln(), epsilon = 1e-9);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
