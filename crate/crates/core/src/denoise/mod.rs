//! Backward denoising under the smoothed score: closed-form flow maps and
//! the densities they transport, the terminal atom/smooth split, a generic
//! Euler integrator of the probability-flow ODE and KL diagnostics.

mod density;
mod flow;
mod histogram;
mod integrate;
mod kl;
mod sampler;
mod schedule;
mod terminal;

pub use density::{pushforward_density, Density1D, NoisedEmpirical1D, Pushforward, UniformDensity};
pub use flow::{flow_inverse, flow_map, flow_map_multi};
pub use histogram::Histogram;
pub use integrate::{integrate_backward, DenoiseRun, HistogramSpec, IntegrateOptions, Snapshot};
pub use kl::{kl_bound, kl_uniform, kl_uniform_density, KL_TOLERANCE};
pub use sampler::{sample_noised_empirical, sample_noised_points};
pub use schedule::NoiseSchedule;
pub use terminal::{terminal_decomposition, TerminalDecomposition};
