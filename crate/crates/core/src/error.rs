use thiserror::Error;

use crate::constraint::GapClause;
use crate::gcs::GcsError;
use crate::mg::MgError;

/// Errors raised while evaluating formulas and fixpoints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] MgError),
    #[error(transparent)]
    System(#[from] GcsError),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("EF guard clause `{0}` has a negative offset; reachability guards must be positive")]
    NonPositiveGuard(GapClause),
    #[error("{operator} model checking of GCS is undecidable; only the EF fragment is supported")]
    Undecidable { operator: &'static str },
    #[error("pre* pool exceeded the cap of {cap} graphs")]
    ResourceLimit { cap: usize },
    #[error("unknown LTS state `{0}`")]
    UnknownState(String),
    #[error("LTS action `{0}` is not an action of the system")]
    AlphabetMismatch(String),
}
