use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |A - A^H| = {0:e})")]
    NotHermitian(f64),

    #[error("trace {0} differs from one")]
    Trace(f64),

    #[error("eigenvalue {0:e} is below the roundoff threshold")]
    NegativeEigenvalue(f64),

    #[error("invalid subsystem selection: {0}")]
    Subsystem(String),

    #[error("boundary distance must be at least 1")]
    ZeroDistance,

    #[error("an infinite boundary distance has no finite-chain representation")]
    InfiniteDistance,

    #[error("problem size out of range: {0}")]
    Size(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
