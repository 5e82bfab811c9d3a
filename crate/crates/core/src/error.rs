use thiserror::Error;

use crate::metric::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    Shape {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("{0}")]
    Domain(String),

    #[error("axiom check failed: {0}")]
    Axiom(Box<ValidationReport>),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is disconnected: nodes {a} and {b} lie in different components")]
    Disconnected { a: usize, b: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
