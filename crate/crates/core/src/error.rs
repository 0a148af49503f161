use alloc::string::String;

/// Errors raised by the coding, bounds, and prover layers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("field modulus {0} is not a prime")]
    NotPrime(u32),
    #[error("evaluation points must be distinct and nonzero")]
    InvalidPoints,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("node {0} supplied more than once")]
    DuplicateNode(usize),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("expected {expected} shares, got {got}")]
    WrongShareCount { expected: usize, got: usize },
    #[error("node {0} cannot help repair itself")]
    SelfRepair(usize),
    #[error("invalid repair set: {0}")]
    InvalidRepairSet(String),
    #[error("all message sizes are zero")]
    EmptySystem,
    #[error("internal error: {0}")]
    InternalError(String),
    #[error("model has {vars} variables, limit is {limit}")]
    ModelTooLarge { vars: usize, limit: usize },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
