use thiserror::Error;

/// Errors raised by the solvers, monitors and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter, or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Non-finite values appeared during time stepping.
    #[error("blow-up at t = {time}: {what}")]
    BlowUp { time: f64, what: String },
    /// An internal invariant drifted beyond tolerance.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
