use thiserror::Error;

/// Errors raised by the stream model, the algorithms and the generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge ({a}, {b}) inserted while already present")]
    DuplicateInsert { a: u32, b: u32 },

    #[error("edge ({a}, {b}) deleted while absent")]
    DeleteAbsent { a: u32, b: u32 },

    #[error("vertex {side}{index} outside [1, {bound}]")]
    VertexOutOfRange { side: char, index: u32, bound: u32 },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("deletion in an insertion-only stream")]
    DeletionUnsupported,

    #[error("coordinate {coordinate} outside [0, {dim})")]
    CoordinateOutOfRange { coordinate: u64, dim: u64 },

    #[error("sketch dimension {0} too large for the fingerprint field")]
    DimensionTooLarge(u64),

    #[error("sketches built from different parameters cannot be merged")]
    IncompatibleSketch,

    #[error("sampling lemma requires y <= k <= n, got y={y} k={k} n={n}")]
    ParameterOrderViolation { y: u64, k: u64, n: u64 },

    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),

    #[error("column {column} outside [1, {bound}]")]
    ColumnOutOfRange { column: u32, bound: u32 },

    #[error("space bound violated: {0}")]
    SpaceBoundViolation(String),

    #[error("unsound witness in trial {trial}: {detail}")]
    UnsoundWitness { trial: usize, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
