//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Construction input violates a type invariant (non-finite entries,
    /// empty layer, non-increasing breakpoints, ...).
    #[error("invalid data: {0}")]
    Invalid(String),

    /// A bound formula was asked for an architecture outside its hypothesis
    /// (some hidden width below the input dimension).
    #[error("bound hypothesis not met: {0}")]
    HypothesisNotMet(String),

    /// Exact region enumeration hit the configured cap.
    #[error("region cap exceeded: more than {0} regions")]
    RegionCapExceeded(usize),

    /// A point was evaluated outside the function's domain.
    #[error("point lies outside the function domain")]
    OutsideDomain,

    /// An operation was called in a way its contract forbids.
    #[error("usage: {0}")]
    Usage(String),

    /// A parameter-slice LP came back infeasible or unbounded, which for a
    /// well-constructed mp-LP indicates a construction bug.
    #[error("slice LP failed: {0}")]
    SliceFailed(String),

    /// File I/O or format error, with the offending path.
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn file(path: &std::path::Path, msg: impl std::fmt::Display) -> Self {
        Error::File {
            path: path.display().to_string(),
            msg: msg.to_string(),
        }
    }
}
