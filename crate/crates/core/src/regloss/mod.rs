//! Score-matching loss, the loss-limit function `F(κ)`, the non-smoothness
//! functional and the optimality certificates built from them.

mod certificate;
mod kappa;
mod loss;
mod piecewise;

pub use certificate::{
    lemma1_convergence_check, nonsmoothness_r, optimality_report, r_lower_bound,
    smoothed_r_closed_form, ConvergenceRow, OptimalityReport,
};
pub use kappa::{f_inverse, f_kappa, f_kappa_numeric};
pub use loss::{
    l2_distance, score_matching_loss_mc, score_matching_loss_quad, EsfCurve, LossEstimate, Score1D,
    DEFAULT_NODES,
};
pub use piecewise::PiecewiseLinear1D;
