use thiserror::Error;

use crate::classifier::ClassLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("metric is singular")]
    SingularMetric,
    #[error("metric is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("contraction slots {0} and {1} are invalid for this tensor")]
    SlotMismatch(usize, usize),
    #[error("contraction of two slots of the same variance needs a metric")]
    MissingMetric,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("rank mismatch: expected ({expected_contra},{expected_cov}), found ({found_contra},{found_cov})")]
    RankMismatch {
        expected_contra: usize,
        expected_cov: usize,
        found_contra: usize,
        found_cov: usize,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("Levi-Civita identity `{0}` failed")]
    LemmaViolation(String),
    #[error("naturality identity `{0}` failed")]
    NaturalityViolation(String),
    #[error("expansion identity `{0}` failed")]
    IdentityViolation(String),
    #[error("no closed form for class {0}")]
    UnsupportedClass(ClassLabel),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {identity}")]
    Validation { identity: String },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
