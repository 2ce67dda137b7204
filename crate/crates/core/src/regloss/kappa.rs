use crate::error::{Error, Result};
use crate::math::{integrate_with_breaks, normal_pdf, normal_sf};
#[allow(unused_imports)]
use num_traits::Float;

/// `F(κ) = 2∫_κ^∞ (u − κ)² φ(u) du = 2[(1 + κ²)Q(κ) − κφ(κ)]`.
///
/// The small-time limit of the loss of `ŝ_{t,κ√t}` for two anchors; it falls
/// strictly from `F(0) = 1` to `0`.
pub fn f_kappa(kappa: f64) -> f64 {
    2.0 * ((1.0 + kappa * kappa) * normal_sf(kappa) - kappa * normal_pdf(kappa))
}

/// `F(κ)` by direct quadrature of its integral definition.
pub fn f_kappa_numeric(kappa: f64) -> f64 {
    let hi = kappa.max(0.0) + 40.0;
    2.0 * integrate_with_breaks(
        |u| (u - kappa) * (u - kappa) * normal_pdf(u),
        kappa,
        hi,
        &[kappa + 1.0, kappa + 4.0, kappa + 10.0],
        1e-14,
    )
}

/// `κ` with `F(κ) = eps`, by bisection on `[0, 40]`.
pub fn f_inverse(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(
            "eps",
            alloc::format!("must lie in (0, 1), got {eps}"),
        ));
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f_kappa(mid);
        if (v - eps).abs() <= 1e-13 * eps.max(1e-300)
            || hi - lo <= 4.0 * f64::EPSILON * mid.max(1.0)
        {
            return Ok(mid);
        }
        if v > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
