use thiserror::Error;

/// Errors raised across the prediction stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A mechanism precondition does not hold (e.g. the threshold gap).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An operation was invoked in a state where it is not allowed.
    #[error("usage error: {0}")]
    Usage(String),

    /// The restricted concept class has no members.
    #[error("version space is empty")]
    VersionSpaceEmpty,

    /// The requested operation is not supported for this input size or class.
    #[error("capability error: {0}")]
    Capability(String),

    /// A sample-size planner could not produce admissible parameters.
    #[error("planning error: {0}")]
    Planning(String),

    /// The predictor exhausted its budget of hard queries.
    #[error("hard-query budget of {0} exhausted")]
    BudgetExceeded(usize),

    /// A fixed query stream ran out of queries.
    #[error("query stream ended")]
    StreamEnd,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<S: Into<String>>(msg: S) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn usage<S: Into<String>>(msg: S) -> Error {
    Error::Usage(msg.into())
}
