use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Hermite level {0} outside 0..=12")]
    LevelOutOfRange(usize),

    /// Sampled data carries too much spectral or spatial weight near the
    /// lattice edges for Fourier interpolation to be trusted.
    #[error("{what}: band-limit residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotBandLimited {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("operator is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("projection onto the measured state vanishes")]
    ZeroProjection,

    #[error("degenerate eigenvalue: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
