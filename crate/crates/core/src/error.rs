use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time must be positive and finite, got {0}")]
    NonPositiveTime(f64),

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid training set: {0}")]
    InvalidTrainingSet(String),

    #[error("time {t} is outside the validity window (0, {limit}) where the smoothing width stays below the half spacing")]
    OutsideValidityWindow { t: f64, limit: f64 },

    #[error("target time s = 0 has no density; use the terminal decomposition instead")]
    TerminalTime,

    #[error("non-finite state at step {step} (sample {sample})")]
    NonFiniteState { step: usize, sample: usize },

    #[error("non-finite gradient at step {step} (parameter {index})")]
    NonFiniteGradient { step: usize, index: usize },

    #[error("training diverged at step {step}: loss {loss}")]
    Diverged { step: usize, loss: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

pub(crate) fn check_finite(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what, value })
    }
}
