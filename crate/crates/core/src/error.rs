use thiserror::Error;

use crate::factor::VarId;

/// Structural errors raised by factor algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactorError {
    #[error("variable {var:?} has {left} states in one factor and {right} in another")]
    StateCountMismatch { var: VarId, left: usize, right: usize },
    #[error("variable {0:?} is not in the factor scope")]
    NotInScope(VarId),
    #[error("variable {0:?} appears more than once in a scope")]
    DuplicateVariable(VarId),
    #[error("state {state} out of range for variable {var:?} with {card} states")]
    StateOutOfRange { var: VarId, state: usize, card: usize },
    #[error("factor table has {actual} cells, scope requires {expected}")]
    TableSize { expected: usize, actual: usize },
    #[error("factor entries must be finite and nonnegative (cell {index} = {value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("joint table would have {cells} cells, above the cap of {cap}")]
    Capacity { cells: u128, cap: usize },
    #[error("variable {0:?} requested but not mentioned by any factor")]
    UnknownVariable(VarId),
}

/// Errors raised while building, loading or saving a model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable id `{0}`")]
    DuplicateVariable(String),
    #[error("invalid state space for `{node}`: {reason}")]
    StateSpace { node: String, reason: String },
    #[error("table for `{node}`: {reason}")]
    Table { node: String, reason: String },
    #[error("missing NIS distribution for route `{0}`")]
    MissingRoute(String),
    #[error("{path}:{line}: {reason}")]
    Parse { path: String, line: usize, reason: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ModelError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        ModelError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Errors raised by scenario queries. An inconsistent scenario is not an
/// error; it is reported through [`crate::ScenarioResult::consistent`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("unknown node `{name}`{}", hint(.suggestion))]
    UnknownNode { name: String, suggestion: Option<String> },
    #[error("unknown state `{state}` for node `{node}`{}", hint(.suggestion))]
    UnknownState {
        node: String,
        state: String,
        suggestion: Option<String>,
    },
    #[error("`{0}` is a utility node and cannot be locked")]
    NotLockable(String),
    #[error("decision `{0}` is already locked")]
    AlreadyLocked(String),
    #[error("`{0}` is not a decision node")]
    NotADecision(String),
    #[error("at least one scenario is required")]
    NoScenarios,
    #[error(transparent)]
    Factor(#[from] FactorError),
}

fn hint(s: &Option<String>) -> String {
    match s {
        Some(s) => format!(" (did you mean `{s}`?)"),
        None => String::new(),
    }
}
