use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors must have at least one coordinate")]
    EmptyVector,
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("basis is rank deficient (vector {index} depends on the previous ones)")]
    RankDeficient { index: usize },
    #[error("a block needs at least one component")]
    EmptyBlock,
    #[error("no convergence within {iterations} iterations")]
    MaxIterExceeded { iterations: usize },
    #[error("numerical breakdown (non-finite iterate) at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
    #[error("reference solution rejected: residual {residual:e} above {threshold:e}")]
    OracleRejected { residual: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
