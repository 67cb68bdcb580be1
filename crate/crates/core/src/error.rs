use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid total order: {0}")]
    InvalidOrder(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("move {0} is the backtrack move and cannot be applied")]
    BacktrackMove(String),

    #[error("partial orders {0} and its reverse cannot appear in the same {1}")]
    Contradictory(String, &'static str),

    #[error("oracle capacity exceeded: {n} events (at most {max} supported)")]
    Capacity { n: usize, max: usize },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
