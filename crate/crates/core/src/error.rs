use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NicfError {
    #[error("{x} is outside the domain [{lo}, {hi}] of {what}")]
    Domain {
        what: String,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inadmissible digit word: {0}")]
    Inadmissible(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "truncation K = {truncation} cannot meet tolerance {tolerance:e} \
         (estimated tail error {estimate:e})"
    )]
    Tolerance {
        truncation: usize,
        tolerance: f64,
        estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, NicfError>;
