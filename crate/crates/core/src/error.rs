use thiserror::Error;

/// Failure modes of the spectral solvers.
///
/// `Domain` and `Precondition` are validation failures (bad input);
/// `Accuracy` and `SearchDepth` mean a computation ran but could not certify
/// its result.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("singular shifted system: {0}")]
    Singular(String),
    #[error("accuracy certification failed: {0}")]
    Accuracy(String),
    #[error("tubular neighbourhood too wide: {0}")]
    TubeTooWide(String),
    #[error("search depth exhausted after {} pair(s): {reason}", partial.len())]
    SearchDepth {
        reason: String,
        /// Pairs `(m, epsilon, residual)` pinned before the search gave up.
        partial: Vec<(i64, f64, f64)>,
    },
    #[error("invalid input file: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }

    /// True for failures caused by invalid input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Precondition(_)
                | Error::Singular(_)
                | Error::TubeTooWide(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
