//! Special functions and quadrature rules shared by the other modules.

mod quadrature;
mod special;

pub use quadrature::{adaptive_simpson, integrate_with_breaks, GaussLegendre, GaussianWindow};
pub use special::{
    gaussian_pdf, ln_gaussian_pdf, log_sum_exp, normal_cdf, normal_pdf, normal_sf, LN_SQRT_2PI,
    SQRT_2PI,
};
