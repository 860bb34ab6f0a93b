use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data; `row` is the 1-based line in the source.
    #[error("input error at row {row}: {message}")]
    Input { row: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Configuration rejected before running anything.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A brute-force oracle refused an input larger than its limits.
    #[error("oracle limit exceeded: {0}")]
    Limit(String),

    #[error("stage {stage} failed on worker {worker}: {message}")]
    Stage {
        stage: String,
        worker: usize,
        message: String,
    },

    #[error("cannot parse dependency {text:?}: {message}")]
    Parse { text: String, message: String },
}
