//! Decision-support engine for ship biofouling management in the Baltic Sea.
//!
//! The crate is layered bottom-up:
//!
//! * [`factor`] and [`elimination`]: discrete factor algebra and exact
//!   sum-product variable elimination.
//! * [`network`] and [`query`]: influence-diagram container, validation and
//!   scenario queries (locked decisions, posterior marginals, expected
//!   utilities).
//! * [`nis`]: hierarchical salinity model fitted by MCMC and the per-route
//!   distribution of non-indigenous species able to survive a voyage.
//! * [`model`]: the 34-node biofouling network, its parameters and the
//!   closed-form cost and emission formulas behind its tables.
//! * [`bundle`]: on-disk model bundle (network file plus parameter and data
//!   files).

pub mod bundle;
pub mod elimination;
pub mod error;
pub mod factor;
pub mod model;
pub mod network;
pub mod nis;
pub mod query;

pub use bundle::ModelBundle;
pub use error::{FactorError, ModelError, QueryError};
pub use factor::{Assignment, Factor, StateSpace, VarId, Variable, VariableKind};
pub use network::{Diagnostic, Network, UtilityNode};
pub use query::{compare_scenarios, query, sweep_decision, Comparison, LockSet, ScenarioResult};
