use thiserror::Error;

/// Errors raised by state construction, distance evaluation and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("zero vector cannot be normalized or canonicalized")]
    ZeroVector,

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("factorization mismatch: {dim_a}x{dim_b} does not match {expected_a}x{expected_b}")]
    FactorizationMismatch {
        dim_a: usize,
        dim_b: usize,
        expected_a: usize,
        expected_b: usize,
    },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("profile '{profile}' violates {condition} at {witness:?}")]
    ProfileViolation {
        profile: String,
        condition: String,
        witness: Vec<f64>,
    },

    #[error("candidate '{candidate}' failed during {axiom}: {message}")]
    Candidate {
        candidate: String,
        axiom: String,
        message: String,
    },

    #[error("value {value} outside [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
