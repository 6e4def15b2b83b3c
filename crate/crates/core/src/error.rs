use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be a prime below 2^32")]
    InvalidModulus(u64),

    #[error("field mismatch: modulus {left} vs {right}")]
    FieldMismatch { left: u64, right: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vectors are linearly dependent: {0}")]
    Dependent(String),

    #[error("tensor is not in X_r form: {0}")]
    NotXrForm(String),

    #[error("search space of {candidates} candidates exceeds the cap of {cap}")]
    SearchTooLarge { candidates: u128, cap: u128 },

    #[error("inconclusive after {attempts} attempts: {step}")]
    Inconclusive { step: String, attempts: usize },

    #[error("rewrite rule not applicable: {0}")]
    RuleNotApplicable(String),

    #[error("witness failed verification: {0}")]
    Unverified(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
