use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("entry ({row}, {col}) is out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("gate {gate} references gate {source_id}, which is not earlier")]
    ForwardReference { gate: usize, source_id: usize },

    #[error("circuit has no outputs")]
    EmptyOutputs,

    #[error("gate {0} breaks the input prefix (inputs must come first, in slot order)")]
    BadInputPrefix(usize),

    #[error("circuit contains multiplication gates")]
    NonLinearCircuit,

    #[error("expected a single-output circuit, found {0} outputs")]
    MultiOutput(usize),

    #[error("step condition violated between columns {left} and {right}")]
    StepViolation { left: usize, right: usize },

    #[error("routing conflict at block size {block}, position {position}")]
    RoutingConflict { block: usize, position: usize },

    #[error("{triples} nonzeros exceed the limit of {limit}")]
    TooManyTriples { triples: usize, limit: usize },

    #[error("expected a square operator, found {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("image list is not a bijection on 0..{0}")]
    NotAPermutation(usize),

    #[error("relu requires real data")]
    NonRealData,

    #[error("gradient descent diverged at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn expect_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
