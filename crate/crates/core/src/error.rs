use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants are grouped into three categories (usage, input, structural)
/// which front ends map onto exit codes via [`Error::category`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("invalid modulus {0}: must be a prime below 65536")]
    InvalidModulus(u32),

    #[error("division by zero in Z/{0}")]
    DivisionByZero(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("input error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("input error: {0}")]
    Input(String),

    #[error("matrix is singular: column {0} reduced to zero")]
    Singular(usize),

    #[error("deletion would corrupt the factorization: row {row} is nonzero in surviving column {column}")]
    ZeroBlockViolation { row: usize, column: usize },

    #[error("invalid filtration diff: {0}")]
    InvalidDiff(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate gradient: {0}")]
    DegenerateGradient(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Input,
    Structural,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::ModulusMismatch(..)
            | Error::InvalidModulus(_)
            | Error::DivisionByZero(_)
            | Error::DimensionMismatch(_)
            | Error::Usage(_) => ErrorCategory::Usage,
            Error::Parse { .. } | Error::Input(_) | Error::DegenerateGradient(_) => {
                ErrorCategory::Input
            }
            Error::Singular(_)
            | Error::ZeroBlockViolation { .. }
            | Error::InvalidDiff(_)
            | Error::Structural(_) => ErrorCategory::Structural,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
