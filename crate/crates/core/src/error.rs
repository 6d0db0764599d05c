use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("label {label} at index {index} is out of range for {modes} modes")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        modes: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A combinatorial budget would be exceeded. `count` is the computed size
    /// of the search space (it may not fit in an integer, hence `f64`).
    #[error("{what}: {count:.3e} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        count: f64,
        cap: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{format} row {row}: {message}")]
    Parse {
        format: &'static str,
        row: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
