//! Symbolic model checking for gap-order constraint systems (GCS).
//!
//! A GCS is an integer counter system whose steps are conjunctions of gap
//! clauses `x - y >= k` over current and next values. Sets of valuations are
//! represented as finite unions of monotonicity graphs ([`SymbolicSet`]),
//! which are closed under the boolean operations and under predecessors, so
//! EF formulas ([`Formula`]) can be evaluated bottom up. On top of that the
//! crate decides (weak) bisimilarity between a GCS state and a finite LTS.
//!
//! Ground truth for tests lives in [`oracle`]: explicit-state evaluation on
//! finite windows, a brute-force QBF evaluator and a differential harness.

pub mod bisim;
pub mod cli;
pub mod constraint;
pub mod error;
pub mod frontend;
pub mod gcs;
pub mod logic;
pub mod mg;
pub mod oracle;
pub mod reductions;
pub mod symbolic;
pub mod weight;

pub use bisim::{equiv_check, FiniteLts, Mode};
pub use constraint::{GapClause, Node, Valuation};
pub use error::EngineError;
pub use gcs::{Gcs, TransitionRule};
pub use logic::{check, denote, Checker, Formula};
pub use mg::{compose, MgError, MonotonicityGraph};
pub use symbolic::{pre_star, Limits, Metrics, PreStar, SymbolicSet};
pub use weight::Weight;
