use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No configuration satisfies the boundary data; the message names the
    /// first constraint that could not be met.
    #[error("infeasible boundary data: {0}")]
    Infeasible(String),

    #[error("resampling gave up after {attempts} attempts (acceptance estimate {acceptance_estimate:.3e})")]
    ResampleTimeout { attempts: usize, acceptance_estimate: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
