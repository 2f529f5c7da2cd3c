use thiserror::Error;

/// Errors surfaced by the exact engines.
///
/// Guard-style variants (`Horizon`, `CostGuard`, `BreakpointGuard`) mark
/// computations that were refused rather than approximated; exactness is
/// never traded for progress.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("observable class mismatch: {0}")]
    ClassMismatch(String),
    #[error("iteration horizon exceeded: {0}")]
    Horizon(String),
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("cost guard tripped: {0}")]
    CostGuard(String),
    #[error("step-function breakpoint guard tripped: {0} breakpoints (limit {1})")]
    BreakpointGuard(usize, usize),
    #[error("no positive bound: {0}")]
    NoPositiveBound(String),
    #[error("spectral solver: {0}")]
    Spectral(String),
    #[error("return-bound scan invariant violated: {0}")]
    ScanInvariant(String),
    #[error("malformed descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code buckets used by the command-line front end:
    /// configuration/descriptor problems exit 2, numerical guards exit 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInterval(_)
            | Error::InvalidParameter(_)
            | Error::Descriptor(_)
            | Error::ClassMismatch(_)
            | Error::Unsupported(_) => 2,
            Error::Horizon(_)
            | Error::CostGuard(_)
            | Error::BreakpointGuard(_, _)
            | Error::NoPositiveBound(_)
            | Error::Spectral(_)
            | Error::ScanInvariant(_) => 3,
        }
    }
}
