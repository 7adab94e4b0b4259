use thiserror::Error;

/// Errors raised by statistics, geometry, ingestion and rendering.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("population `{0}` is empty")]
    EmptyPopulation(String),

    #[error("bandwidth must be a finite positive number, got {0}")]
    InvalidBandwidth(f64),

    #[error("median heuristic failed: median pairwise distance of the pooled sample is zero")]
    DegenerateBandwidth,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("{0}")]
    InsufficientSamples(String),

    #[error("population `{0}` has zero variance")]
    ZeroVariance(String),

    #[error(
        "sample count mismatch: population `{label}` has {found} values, reference has {expected}"
    )]
    LengthMismatch {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
