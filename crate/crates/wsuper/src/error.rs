//! Error type shared by every module of the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field tower capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("root decomposition failed: {0}")]
    Decomposition(String),
    #[error("minimal root selection failed: {0}")]
    Selection(String),
    #[error("grading error: {0}")]
    Grading(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("straightening failure: {0}")]
    Straightening(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("matchability error: {0}")]
    Matchability(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
