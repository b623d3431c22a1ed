use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("budget exceeded: {what} = {value} exceeds the limit {limit}")]
    Budget {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("conditioning event too rare: P(Y = k) = {0:e} is below 1e-6")]
    RareEvent(f64),
    #[error("proposal set is not finitely enumerable for model `{0}`")]
    NotEnumerable(String),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
