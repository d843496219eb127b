use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("size cap exceeded: {what} needs {size}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("spectral decomposition failed: {0}")]
    Decomposition(String),

    #[error("orthonormality drift {drift:.3e} exceeds abort threshold {limit:.1e} at t = {time}")]
    OrthonormalityDrift { drift: f64, limit: f64, time: f64 },

    #[error("input has no antisymmetric component")]
    ZeroAntisymmetricPart,

    #[error("operator is not a basis-diagonal projection")]
    NotDiagonalProjection,

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("negative density value {value:.3e} at site {site}")]
    NegativeDensity { value: f64, site: usize },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
