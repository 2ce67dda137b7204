//! Closed-form score functions of point training sets.
//!
//! For a training set `y_1 < … < y_n` on the first coordinate axis of ℝᵈ
//! the module evaluates
//!
//! * the empirical score `(x̂_t(x) − x)/t`, where `x̂_t` is the softmax
//!   posterior mean of the anchors,
//! * its piecewise-linear small-time limit, which points every location to
//!   the anchor of its Voronoi cell with slope `−1/t`,
//! * the smoothed piecewise-linear score `ŝ_{t,δ}`, which keeps slope `−1/t`
//!   on the bands `|x − y_k| ≤ δ` and joins neighbouring bands by a shallow
//!   segment through the midpoint.
//!
//! Normal coordinates always carry `−x_i/t`.

mod evaluators;
mod field;
mod training_set;

pub(crate) use evaluators::posterior_mean_unchecked;
pub use evaluators::{
    clip_in_place, clip_score, default_clip_norm, esf_1d, esf_multi, esf_points, pl_esf,
    posterior_mean, smoothed_multi, smoothed_pl_esf, DEFAULT_CLIP_SCALE,
};
pub use field::{
    EmpiricalScore, FieldKind, PlScore, PointSetScore, ScoreField, SmoothedScore, ZeroField,
};
pub use training_set::{Region, SmoothingParams, TrainingSet};
