//! Small MLP score models trained from scratch with AdamW.
//!
//! Two architectures are provided: a fixed-time model for one noise level
//! (ReLU MLP plus an unregularized affine skip connection) and a
//! time-conditioned model made of three two-layer blocks (a shared first
//! layer on `log t` feeding a time embedding and an output modulation, and a
//! body MLP on `[x; embedding]`), whose output is divided by `√t`.

mod adamw;
mod datasets;
mod fit;
mod gradcheck;
mod mlp;
mod train;

pub use adamw::AdamW;
pub use datasets::{make_circle_set, make_nonuniform_set};
pub use fit::{fit_delta, DeltaFit};
pub use gradcheck::{gradient_check, random_batch, GradientCheck};
pub use mlp::{Architecture, MlpScoreModel, ParamGroup, TrainBatch};
pub use train::{
    draw_batch, train_fixed_t, train_time_conditioned, train_with, TimeSampling, TrainConfig,
    TrainOutcome, DIVERGENCE_LOSS,
};
