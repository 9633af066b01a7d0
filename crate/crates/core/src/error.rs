//! Error type shared by the numeric layers of the crate.

use thiserror::Error;

/// Errors raised by state validation and the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument failed validation (dimension mismatch, non-Hermitian input,
    /// unnormalized probability vector, ...). The message names what failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative routine exhausted its iteration budget without reaching
    /// its convergence threshold.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for building an `InvalidArgument` error from format arguments.
macro_rules! invalid_arg {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(format!($($arg)*))
    };
}

pub(crate) use invalid_arg;
