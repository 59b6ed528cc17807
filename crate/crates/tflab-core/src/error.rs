//! Error types shared by every module of the crate.
//!
//! Errors are split by the kind of precondition they violate, because the CLI
//! maps them to distinct exit codes: numeric preconditions (an input value is
//! outside its documented domain, a tolerance cannot be met) versus structural
//! preconditions (a matrix is not Hermitian, a grid does not match, a lattice
//! does not divide the grid).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument is outside its documented domain.
    #[error("numeric precondition violated: {0}")]
    Numeric(String),

    /// An object fails a structural requirement (shape, symmetry, divisibility).
    #[error("structural precondition violated: {0}")]
    Structural(String),

    /// A Gabor system whose frame operator is numerically singular.
    #[error(
        "frame failure: frame operator numerically singular (min eigenvalue {min_eig:.3e}, \
         max eigenvalue {max_eig:.3e})"
    )]
    FrameFailure { min_eig: f64, max_eig: f64 },

    /// An iterative solver did not reach its residual target.
    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    /// A parser rejected its input (weight grammar, symbol grammar, file formats).
    #[error("parse error: {0}")]
    Parse(String),

    /// File input/output failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
