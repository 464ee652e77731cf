use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fresh channel budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),
    #[error("relation carriers do not match: {0}")]
    CarrierMismatch(String),
    #[error("silent relation violates the normal-silence axioms: {0}")]
    SilentAxiomsViolated(String),
    #[error("relation touches {count} state(s) whose transitions are not fully explored")]
    IncompleteStates { count: usize },
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unbound identifier `{name}` at {line}:{column}")]
    UnboundIdentifier { name: String, line: usize, column: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
