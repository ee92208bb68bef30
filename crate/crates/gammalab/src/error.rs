use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GammaError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of size {p}^{degree} exceeds the 2^24 cap")]
    TooLarge { p: u64, degree: u32 },
    #[error("invalid field parameters: {0}")]
    BadParameters(String),
    #[error("division by zero")]
    DivideByZero,
    #[error("element {elem} is not in the degree-{degree} subfield")]
    NotInSubfield { elem: u32, degree: u32 },
    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,
    #[error("matrix is singular")]
    Singular,
    #[error("character exponent {k} is not regular for n = {n}")]
    NotRegular { k: u64, n: u32 },
    #[error("zero scalar in antidiagonal element")]
    ZeroScalar,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed Shalika element: {0}")]
    MalformedShalikaElement(String),
    #[error("representation admits a Shalika vector; use the level-zero modified functional equation")]
    ShalikaVectorPresent,
    #[error("ratio dual_js/js is not constant: residual {residual:e}")]
    NonConstantRatio { residual: f64 },
    #[error("closed form unavailable for n = {0}")]
    UnsupportedN(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("oracle check failed: {0}")]
    OracleFailed(String),
    #[error("dimension bound violated: value {0}")]
    DimensionBoundViolated(f64),
}

pub type Result<T> = std::result::Result<T, GammaError>;
