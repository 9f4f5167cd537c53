use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("outside coverage: {0}")]
    OutOfCoverage(String),

    #[error("did not converge: {0}")]
    NonConvergent(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("dimension {dim} exceeds limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("vanishing pairing: {0}")]
    VanishingPairing(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
