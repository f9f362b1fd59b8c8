use thiserror::Error;

use crate::pa::ValidationReport;

#[derive(Debug, Error)]
pub enum PaError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown letter {symbol:?}{}", position.map(|p| format!(" at position {p}")).unwrap_or_default())]
    UnknownLetter { symbol: String, position: Option<usize> },
    #[error("invalid automaton:\n{0}")]
    Invalid(ValidationReport),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("search budget exceeded: {required} word evaluations needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("{0}")]
    Input(String),
}

impl PaError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        PaError::Input(msg.into())
    }
}

pub type Result<T, E = PaError> = std::result::Result<T, E>;
