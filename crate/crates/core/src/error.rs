use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong while reading an `.mts` container.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header, expected `n d1 d2 c`: {0}")]
    MalformedHeader(String),
    #[error("label {label} outside [0, {n_classes})")]
    LabelOutOfRange { label: i64, n_classes: usize },
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
    #[error("expected {expected} values per row, found {found}")]
    WrongColumnCount { expected: usize, found: usize },
    #[error("unexpected end of file, observation {observation} incomplete")]
    UnexpectedEof { observation: usize },
    #[error("trailing content after the last observation")]
    TrailingContent,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("non-finite value `{0}`")]
    NonFinite(String),
    #[error("missing trailing newline")]
    MissingTrailingNewline,
    #[error("class {0} has no observations")]
    EmptyClass(usize),
}

/// Coarse failure category, used by the command line front-end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Numerical,
    Unavailable,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("matrix is not positive definite (minimum eigenvalue {min_eigenvalue:e}, maximum {max_eigenvalue:e})")]
    NotPositiveDefinite {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("within-class scatter of the {direction} direction is singular: rank {rank} < {dim} (deficit {})", dim - rank)]
    SingularWithinClass {
        direction: Direction,
        rank: usize,
        dim: usize,
    },

    #[error("fold {fold} is degenerate: {reason}")]
    FoldDegenerate { fold: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Io(_) => ErrorCategory::Input,
            Error::NotPositiveDefinite { .. } | Error::Degenerate(_) | Error::FoldDegenerate { .. } => {
                ErrorCategory::Numerical
            }
            Error::SingularWithinClass { .. } => ErrorCategory::Unavailable,
        }
    }
}

/// The two modes of a matrix observation. `Column` works on the `d1 x d1`
/// column-column scatter (left factor), `Row` on the `d2 x d2` row-row scatter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    Column,
    Row,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Column, Direction::Row];

    /// 1 for the column direction, 2 for the row direction.
    pub fn index(self) -> usize {
        match self {
            Direction::Column => 1,
            Direction::Row => 2,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Column => f.write_str("column"),
            Direction::Row => f.write_str("row"),
        }
    }
}
