//! Score smoothing laboratory core.
//!
//! Closed-form score functions for point training sets (the empirical score,
//! its piecewise-linear small-time limit and the smoothed piecewise-linear
//! variant), the analytic backward flow they induce together with its
//! density pushforwards, the score-matching loss and the non-smoothness
//! functional, and a from-scratch MLP score learner.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! experiment orchestration live in the `scoresmooth-lab` crate.
//!
//! | module | contents |
//! |--------|----------|
//! | [`scorefield`] | training sets, score evaluators, the [`ScoreField`] trait |
//! | [`regloss`] | piecewise-linear functions, loss, `F(κ)`, non-smoothness, certificates |
//! | [`denoise`] | noise schedule, flow maps, pushforwards, terminal law, Euler sampler, KL |
//! | [`nnscore`] | MLP score models, AdamW, trainers, δ fitting, datasets |

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod denoise;
pub mod error;
pub mod math;
pub mod nnscore;
pub mod points;
pub mod regloss;
pub mod rng;
pub mod scorefield;

pub use error::{Error, Result};
pub use points::PointCloud;
pub use scorefield::{FieldKind, ScoreField, SmoothingParams, TrainingSet};
