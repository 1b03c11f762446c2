use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad data, arguments or sizes supplied by the caller.
    Input,
    /// The numerical engine could not produce a trustworthy answer.
    Solver,
    /// A result contradicted a property the models are proven to have.
    TheoremViolation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing header row")]
    MissingHeader,
    #[error("bad header at column {column}: {message}")]
    BadHeader { column: usize, message: String },
    #[error("{message} at row {row}, column {column}")]
    BadValue {
        row: usize,
        column: String,
        message: String,
    },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate DMU id {id} at row {row}")]
    DuplicateId { id: String, row: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("unknown DMU id {0}")]
    UnknownDmu(String),
    #[error("DMU index {index} out of range for {n} units")]
    DmuIndexOutOfRange { index: usize, n: usize },
    #[error("invalid tolerance {name} = {value}: must satisfy 0 < value < 1")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("oracle size guard: {size} exceeds the limit of {limit}; {hint}")]
    OracleSizeGuard {
        size: usize,
        limit: usize,
        hint: &'static str,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("iteration limit of {0} simplex iterations reached")]
    IterationLimit(usize),
    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimit(usize),
    #[error("while evaluating DMU {id}: {source}")]
    AtDmu {
        id: String,
        #[source]
        source: Box<Error>,
    },
    #[error("internal solver inconsistency: {0}")]
    Internal(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NumericalBreakdown(_)
            | Error::IterationLimit(_)
            | Error::NodeLimit(_)
            | Error::Internal(_) => ErrorKind::Solver,
            Error::TheoremViolation(_) => ErrorKind::TheoremViolation,
            Error::AtDmu { source, .. } => source.kind(),
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn at_dmu(self, id: &str) -> Error {
        match self {
            e @ Error::AtDmu { .. } => e,
            e => Error::AtDmu {
                id: id.to_string(),
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
