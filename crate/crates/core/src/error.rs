use thiserror::Error;

use crate::ambient::{Ambient, Element};

/// Errors raised by ambient-structure operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AmbientError {
    #[error("inversion is not defined on the monoid N0")]
    NoInverse,
    #[error("element {0} does not belong to ambient {1}")]
    WrongAmbient(String, Ambient),
    #[error("free-group word length exceeds the cap of {cap} (got {len})")]
    WordCapExceeded { len: usize, cap: usize },
}

/// Errors raised by set-expression evaluation and classification.
#[derive(Debug, Clone, Error)]
pub enum SetError {
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error("membership query for {element} is outside the guarantee ball({level}) of predicate `{name}`")]
    HorizonExceeded {
        name: String,
        element: String,
        level: u32,
    },
    #[error("set variant `{0}` is not supported over ambient {1}")]
    UnsupportedAmbient(String, Ambient),
    #[error("empty finite set is not allowed here")]
    EmptyFinite,
    #[error("invalid eventually-periodic data: {0}")]
    BadPeriodic(String),
    #[error("precondition violated: {reason} (offending element {offender})")]
    Precondition { reason: String, offender: String },
    #[error("horizon exhausted: {0}")]
    Horizon(String),
}

/// Element-level witness re-check failure, carried inside reports.
#[derive(Debug, Clone, Error)]
#[error("witness re-check failed at {element}: {reason}")]
pub struct WitnessError {
    pub element: String,
    pub reason: String,
}

impl Element {
    pub(crate) fn describe(&self) -> String {
        format!("{self}")
    }
}
