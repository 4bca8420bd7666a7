//! The biofouling management model: node catalog, parameters, formulas,
//! tables and the network builder.

pub mod build;
pub mod catalog;
pub mod formulas;
pub mod params;
pub mod routes;
pub mod tables;

pub use build::{build_network, check_model, ICE_REASON};
pub use catalog::{Coating, CollectMode, FoulingType, FuelType, IwcMethod, SedimentClass};
pub use params::{DragModel, EconParams, EmissionParams, ModelParams, RiskParams};
pub use routes::{default_nis, default_routes, default_sediment, Route};
