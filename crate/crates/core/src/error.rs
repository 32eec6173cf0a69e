use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode violation: {0}")]
    ModeViolation(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("variable index {index} out of range for g = {g}")]
    IndexOutOfRange { index: usize, g: usize },

    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("fractional power of a matrix with negative eigenvalue {0:.3e}")]
    NegativeSpectrum(f64),

    #[error("singular matrix (condition estimate {0:.3e})")]
    Singular(f64),

    #[error("group membership violated: {0}")]
    GroupViolation(String),

    #[error("point outside domain: norm {norm:.6e} exceeds radius {radius:.6e}")]
    OutOfDomain { norm: f64, radius: f64 },

    #[error("substituted series component {0} has a nonzero constant part")]
    NonzeroConstant(usize),

    #[error("non-finite value encountered during evaluation")]
    NonFinite,

    #[error("rank deficient system: {0}")]
    RankDeficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
