//! Salinity-tolerance model for non-indigenous species.
//!
//! Area salinities are fitted with a hierarchical normal model by MCMC;
//! each posterior draw decides which species present at a route's departure
//! area can survive at its arrival area. The resulting survivor counts give
//! the per-route distribution of the NIS-value node.

pub mod area;
pub mod diagnostics;
pub mod mcmc;
pub mod route_dist;
pub mod salinity;
pub mod species;
pub(crate) mod table;

pub use area::Area;
pub use mcmc::{fit_salinity_model, Draw, FitDiagnostics, McmcConfig, PosteriorSamples, PriorConfig};
pub use route_dist::{
    map_count, route_nis_distribution, species_survival, survivor_count, RouteNisDistribution, SalinityBand,
    SurvivalRule, NIS_STATES,
};
pub use salinity::{load_salinity, parse_salinity, SalinityObservation};
pub use species::{load_species_table, parse_species_table, SpeciesRecord};
