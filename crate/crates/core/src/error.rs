use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-unit: element has valuation {0}")]
    NonUnit(u32),
    #[error("precision out of range: {0}")]
    Precision(String),
    #[error("operands live in different contexts")]
    ContextMismatch,
    #[error("window overflow: degree {degree} outside [-{window}, {window}]")]
    Truncation { degree: i64, window: i64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("map is not well defined: {0}")]
    IllDefined(String),
    #[error("not N-determined: {0}")]
    NotNDetermined(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("integrality failure: {0}")]
    Integrality(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
