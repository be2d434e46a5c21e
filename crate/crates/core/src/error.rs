use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// A matrix that must be SPD failed to factor.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible basis: basis is bound to mesh {basis:016x}, operators belong to mesh {operators:016x}")]
    IncompatibleBasis { basis: u64, operators: u64 },

    /// The reference trajectory has zero norm, so a relative error is undefined.
    #[error("relative error undefined: reference trajectory has zero norm")]
    ZeroReference,

    #[error("Laplace solve failed at node {index}: {source}")]
    NodeFailure {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
