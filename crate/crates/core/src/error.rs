use thiserror::Error;

/// Errors raised by the Landau computation.
#[derive(Debug, Error)]
pub enum LandauError {
    /// The benefit bound did not drop below the structural threshold B₁.
    #[error("benefit bound failure at n={n}: B={b} is not below B1={b1}")]
    BoundFailure { n: u64, b: f64, b1: f64 },

    /// A normalized candidate leaves a suffix budget reaching below √x₁.
    #[error(
        "suffix budget too large at n={n}: p={p} minus m={m} falls below sqrt(x1)={sqrt_x1}"
    )]
    SuffixBudget {
        n: u64,
        p: u64,
        m: u64,
        sqrt_x1: f64,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("delta1 search for p={p} exceeded the ceiling {ceiling}")]
    Delta1Ceiling { p: u64, ceiling: u64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LandauError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LandauError::BoundFailure { .. } => 2,
            LandauError::SuffixBudget { .. } => 3,
            LandauError::Capacity(_) => 4,
            LandauError::Delta1Ceiling { .. } => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LandauError>;
