use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::ComplexVector;

pub type Result<T> = std::result::Result<T, Error>;

/// Diagnostics attached to a failed LU factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularInfo {
    /// Elimination step at which the pivot collapsed.
    pub column: usize,
    /// Modulus of the largest candidate pivot in that column.
    pub pivot: f64,
    /// `1e-14 * max |a_ij|` of the input matrix.
    pub threshold: f64,
    /// Unit (2-norm) vector `x` with `A x` of the order of the collapsed pivot.
    pub near_null: ComplexVector,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("zero vector: residual ratio undefined")]
    ZeroVector,

    #[error(
        "singular matrix: pivot {:.3e} at column {} is below threshold {:.3e}",
        .0.pivot, .0.column, .0.threshold
    )]
    Singular(Box<SingularInfo>),

    #[error("shifted operator S - w^{index} sigma I is singular")]
    SingularShift { index: usize, info: Box<SingularInfo> },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize, partial: Vec<Complex64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Singularity diagnostics, if this error came from a collapsed pivot.
    pub fn singular_info(&self) -> Option<&SingularInfo> {
        match self {
            Error::Singular(info) | Error::SingularShift { info, .. } => Some(info),
            _ => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular_info().is_some()
    }
}
