use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integrality: atom {0} is not an integer")]
    Integrality(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("too large for dense SVD: min dimension {got} exceeds {cap}")]
    TooLargeForSvd { got: usize, cap: usize },
    #[error("not on sphere: norm {0}")]
    NotOnSphere(f64),
    #[error("zero vector at index {0}")]
    ZeroVector(usize),
    #[error("not in subspace: candidate {index} lies {distance:e} from span(E)")]
    NotInSubspace { index: usize, distance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
