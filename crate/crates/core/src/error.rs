use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid spike train: {0}")]
    InvalidTrain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("data point {index} has non-positive standard error {sem}")]
    NonPositiveSem { index: usize, sem: f64 },

    #[error("objective is not finite anywhere in the search region")]
    NonFiniteObjective,

    #[error("all {0} starts failed")]
    AllStartsFailed(usize),
}
