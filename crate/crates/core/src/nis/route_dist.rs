use serde::{Deserialize, Serialize};

use super::area::Area;
use super::mcmc::{Draw, PosteriorSamples};
use super::species::SpeciesRecord;
use crate::error::ModelError;
use crate::factor::StateSpace;
use crate::model::routes::Route;

/// Numbered states of the NIS-value node.
pub const NIS_STATES: [f64; 14] = [
    1.0, 3.0, 7.0, 9.0, 10.0, 15.0, 17.0, 18.0, 30.0, 31.0, 32.0, 33.0, 36.0, 53.0,
];

/// Mean minimum and maximum salinity of an area in one posterior draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SalinityBand {
    pub min: f64,
    pub max: f64,
}

/// How a species' tolerance interval is compared with an area's band.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurvivalRule {
    /// Tolerance interval contains the whole band.
    #[default]
    Containment,
    /// Tolerance interval and band intersect.
    Overlap,
}

impl PosteriorSamples {
    pub fn band(&self, draw: &Draw, area: Area) -> Option<SalinityBand> {
        let k = self.area_index(area)?;
        Some(SalinityBand {
            min: draw.mu_x[k],
            max: draw.mu_y[k],
        })
    }
}

/// Whether a species survives in an area with the given salinity band.
/// Boundary equality counts as survival.
pub fn species_survival(band: SalinityBand, species: &SpeciesRecord, rule: SurvivalRule) -> bool {
    match rule {
        SurvivalRule::Containment => species.sal_min_tol <= band.min && band.max <= species.sal_max_tol,
        SurvivalRule::Overlap => species.sal_min_tol <= band.max && band.min <= species.sal_max_tol,
    }
}

/// Distribution of the number of species able to survive one route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteNisDistribution {
    pub route: String,
    /// Probability of each survivor count `0..=S`; `S` is the size of the
    /// species list, or the count itself for point distributions.
    pub counts: Vec<f64>,
    /// Probability of each NIS-value state, in [`NIS_STATES`] order.
    pub mapped: Vec<f64>,
}

impl RouteNisDistribution {
    /// All mass on a single NIS-value state.
    pub fn point(route: impl Into<String>, value: f64) -> Result<Self, ModelError> {
        let state = NIS_STATES
            .iter()
            .position(|v| *v == value)
            .ok_or_else(|| ModelError::Validation(format!("{value} is not a NIS-value state")))?;
        let mut mapped = vec![0.0; NIS_STATES.len()];
        mapped[state] = 1.0;
        let n = value as usize;
        let mut counts = vec![0.0; n + 1];
        counts[n] = 1.0;
        Ok(RouteNisDistribution {
            route: route.into(),
            counts,
            mapped,
        })
    }

    pub fn expected_count(&self) -> f64 {
        self.counts.iter().enumerate().map(|(c, p)| c as f64 * p).sum()
    }

    pub fn expected_mapped(&self) -> f64 {
        self.mapped.iter().zip(NIS_STATES).map(|(p, v)| p * v).sum()
    }
}

/// Index of the NIS-value state nearest to a survivor count; ties go to
/// the smaller state.
pub fn map_count(count: usize) -> usize {
    StateSpace::Numbered(NIS_STATES.to_vec())
        .bin(count as f64)
        .expect("numbered space bins every value")
}

/// Number of species present at `departure` that survive in `band`.
pub fn survivor_count(species: &[SpeciesRecord], departure: Area, band: SalinityBand, rule: SurvivalRule) -> usize {
    species
        .iter()
        .filter(|s| s.present_in(departure) && species_survival(band, s, rule))
        .count()
}

/// Empirical distribution of survivor counts over the posterior draws.
pub fn route_nis_distribution(
    route: &Route,
    species: &[SpeciesRecord],
    post: &PosteriorSamples,
    rule: SurvivalRule,
) -> Result<RouteNisDistribution, ModelError> {
    if post.area_index(route.arrival).is_none() {
        return Err(ModelError::Validation(format!(
            "posterior has no salinity draws for arrival area {} of route {}",
            route.arrival, route.id
        )));
    }
    if post.draws.is_empty() {
        return Err(ModelError::Validation("posterior has no draws".into()));
    }
    let mut counts = vec![0.0; species.len() + 1];
    if !species.iter().any(|s| s.present_in(route.departure)) {
        log::warn!(
            "route {}: no species present at departure area {}; NIS value fixed at {}",
            route.id,
            route.departure,
            NIS_STATES[0]
        );
        counts[0] = 1.0;
    } else {
        let w = 1.0 / post.draws.len() as f64;
        for d in &post.draws {
            let band = post.band(d, route.arrival).expect("arrival checked above");
            counts[survivor_count(species, route.departure, band, rule)] += w;
        }
    }
    let mut mapped = vec![0.0; NIS_STATES.len()];
    for (c, p) in counts.iter().enumerate() {
        if *p > 0.0 {
            mapped[map_count(c)] += p;
        }
    }
    Ok(RouteNisDistribution {
        route: route.id.clone(),
        counts,
        mapped,
    })
}
