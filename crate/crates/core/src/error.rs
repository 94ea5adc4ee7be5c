use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no roots defined for a constant or zero polynomial")]
    NoRoots,

    #[error("t = {t} lies outside the signal interval [0, {horizon}]")]
    Domain { t: f64, horizon: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole detected at s = {at}")]
    PoleDetected { at: Complex64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "order too high for horizon T = {horizon}: N = {order} has condition estimate {condition:.3e}; \
         use N <= {suggested}"
    )]
    OrderTooHigh {
        order: usize,
        horizon: f64,
        condition: f64,
        suggested: usize,
    },

    #[error("cannot normalize: reconstructed value at t = T is zero")]
    CannotNormalize,

    #[error("terminal conditions underdetermined: {0}")]
    Underdetermined(String),

    #[error("response is not analytic after terminal substitution: {0}")]
    NonAnalytic(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    /// Errors that come from the mathematics of the input rather than from
    /// malformed input text or arguments.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::LengthMismatch { .. }
        )
    }
}
