use thiserror::Error;

/// Failure kinds shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("model assumption violated: {0}")]
    Assumption(String),
    #[error("grid problem: {0}")]
    Grid(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("mode capacity exceeded: need frequency {needed}, kmax is {kmax}")]
    Capacity { needed: u64, kmax: u64 },
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } | Error::Fit(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}
