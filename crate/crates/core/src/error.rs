use thiserror::Error;

/// Errors produced by the search library and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A caller skipped a documented precondition, e.g. asked for a split
    /// while some cell already carries at least `eps_par` of the mass.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("coin comparison did not resolve within {0} paired flips")]
    FlipCapExceeded(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

impl Error {
    /// Process exit status for the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}
