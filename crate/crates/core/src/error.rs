//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by validation, construction and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace {0} differs from the required value")]
    Trace(f64),
    #[error("non-finite entry")]
    NonFinite,
    #[error("not trace preserving (marginal deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
