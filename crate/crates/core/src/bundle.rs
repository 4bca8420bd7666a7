//! Model bundle directory: network file, parameter files and data tables.
//!
//! Every file is optional on load; a missing file falls back to the
//! built-in default. When `network.json` is present it is used as is,
//! otherwise the network is built from the parameters and data tables.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::ModelError;
use crate::model::params::{self, DragModel, EconParams, EmissionParams, ModelParams, RiskParams};
use crate::model::routes::{self, Route};
use crate::model::{build_network, check_model, SedimentClass};
use crate::network::Network;
use crate::nis::{
    fit_salinity_model, route_nis_distribution, salinity, species, McmcConfig, PosteriorSamples, PriorConfig,
    RouteNisDistribution, SalinityObservation, SpeciesRecord, SurvivalRule,
};

pub const NETWORK_FILE: &str = "network.json";
pub const ECON_FILE: &str = "econ.toml";
pub const EMISSIONS_FILE: &str = "emissions.toml";
pub const DRAG_FILE: &str = "drag.toml";
pub const RISK_FILE: &str = "risk.toml";
pub const SPECIES_FILE: &str = "species.tsv";
pub const SALINITY_FILE: &str = "salinity.tsv";
pub const ROUTES_FILE: &str = "routes.tsv";
pub const SEDIMENT_FILE: &str = "sediment.tsv";
pub const NIS_FILE: &str = "nis.tsv";

const DEFAULT_SPECIES: &str = include_str!("../data/species.tsv");
const DEFAULT_SALINITY: &str = include_str!("../data/salinity.tsv");

/// Everything needed to rebuild or refit the model.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub params: ModelParams,
    pub routes: Vec<Route>,
    pub sediment: BTreeMap<String, SedimentClass>,
    pub nis: BTreeMap<String, RouteNisDistribution>,
    pub species: Vec<SpeciesRecord>,
    pub salinity: Vec<SalinityObservation>,
    pub network: Network,
}

pub fn default_species() -> Vec<SpeciesRecord> {
    species::parse_species_table(DEFAULT_SPECIES, "built-in species table").expect("built-in species table parses")
}

pub fn default_salinity() -> Vec<SalinityObservation> {
    salinity::parse_salinity(DEFAULT_SALINITY, "built-in salinity table").expect("built-in salinity table parses")
}

impl ModelBundle {
    /// The built-in model.
    pub fn default_bundle() -> Result<ModelBundle, ModelError> {
        let params = ModelParams::default();
        let routes = routes::default_routes();
        let sediment = routes::default_sediment();
        let nis = routes::default_nis();
        let network = build_network(&params, &routes, &sediment, &nis)?;
        Ok(ModelBundle {
            params,
            routes,
            sediment,
            nis,
            species: default_species(),
            salinity: default_salinity(),
            network,
        })
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<ModelBundle, ModelError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(ModelError::Validation(format!(
                "model directory {} does not exist",
                dir.display()
            )));
        }
        let params = ModelParams {
            econ: params::read_toml::<EconParams>(&dir.join(ECON_FILE))?,
            emissions: params::read_toml::<EmissionParams>(&dir.join(EMISSIONS_FILE))?,
            drag: params::read_toml::<DragModel>(&dir.join(DRAG_FILE))?,
            risk: params::read_toml::<RiskParams>(&dir.join(RISK_FILE))?,
        };
        let text = |name: &str| -> Result<Option<(String, String)>, ModelError> {
            let path = dir.join(name);
            if !path.exists() {
                return Ok(None);
            }
            let t = std::fs::read_to_string(&path).map_err(|e| ModelError::io(&path, e))?;
            Ok(Some((t, path.display().to_string())))
        };
        let routes = match text(ROUTES_FILE)? {
            Some((t, o)) => routes::parse_routes(&t, &o)?,
            None => routes::default_routes(),
        };
        let sediment = match text(SEDIMENT_FILE)? {
            Some((t, o)) => routes::parse_sediment(&t, &o)?,
            None => routes::default_sediment(),
        };
        let nis = match text(NIS_FILE)? {
            Some((t, o)) => routes::parse_nis(&t, &o)?,
            None => routes::default_nis(),
        };
        let species = match text(SPECIES_FILE)? {
            Some((t, o)) => species::parse_species_table(&t, &o)?,
            None => default_species(),
        };
        let salinity = match text(SALINITY_FILE)? {
            Some((t, o)) => salinity::parse_salinity(&t, &o)?,
            None => default_salinity(),
        };
        let network = match text(NETWORK_FILE)? {
            Some((t, _)) => {
                let net = Network::from_json(&t)?;
                check_model(&net)?;
                net
            }
            None => build_network(&params, &routes, &sediment, &nis)?,
        };
        Ok(ModelBundle {
            params,
            routes,
            sediment,
            nis,
            species,
            salinity,
            network,
        })
    }

    /// Writes every bundle file into `dir`, creating it if needed.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), ModelError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| ModelError::io(dir, e))?;
        let files = [
            (NETWORK_FILE, self.network.to_json()),
            (ECON_FILE, params::econ_file(&self.params.econ)),
            (EMISSIONS_FILE, params::emissions_file(&self.params.emissions)),
            (DRAG_FILE, params::drag_file(&self.params.drag)),
            (RISK_FILE, params::risk_file(&self.params.risk)),
            (SPECIES_FILE, species::format_species_table(&self.species)),
            (SALINITY_FILE, salinity::format_salinity(&self.salinity)),
            (ROUTES_FILE, routes::format_routes(&self.routes)),
            (SEDIMENT_FILE, routes::format_sediment(&self.routes, &self.sediment)),
            (NIS_FILE, routes::format_nis(&self.routes, &self.nis)),
        ];
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| ModelError::io(&path, e))?;
        }
        Ok(())
    }

    /// Rebuilds the network from the current parameters and tables.
    pub fn rebuild(&mut self) -> Result<(), ModelError> {
        self.network = build_network(&self.params, &self.routes, &self.sediment, &self.nis)?;
        Ok(())
    }

    /// Replaces the per-route NIS distributions and rebuilds.
    pub fn with_nis(&self, nis: BTreeMap<String, RouteNisDistribution>) -> Result<ModelBundle, ModelError> {
        let mut b = self.clone();
        b.nis = nis;
        b.rebuild()?;
        Ok(b)
    }

    /// Per-route NIS distributions from a posterior.
    pub fn nis_from_posterior(
        &self,
        post: &PosteriorSamples,
        rule: SurvivalRule,
    ) -> Result<BTreeMap<String, RouteNisDistribution>, ModelError> {
        self.routes
            .iter()
            .map(|r| Ok((r.id.clone(), route_nis_distribution(r, &self.species, post, rule)?)))
            .collect()
    }

    /// Fits the salinity model to the bundle's observations and returns the
    /// rebuilt bundle together with the posterior.
    pub fn refit_nis(
        &self,
        prior: &PriorConfig,
        mcmc: &McmcConfig,
        rule: SurvivalRule,
    ) -> Result<(ModelBundle, PosteriorSamples), ModelError> {
        let post = fit_salinity_model(&self.salinity, prior, mcmc)?;
        let nis = self.nis_from_posterior(&post, rule)?;
        Ok((self.with_nis(nis)?, post))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_round_trip() {
        let b = ModelBundle::default_bundle().unwrap();
        let dir = tempfile::tempdir().unwrap();
        b.save(dir.path()).unwrap();
        let back = ModelBundle::load(dir.path()).unwrap();
        assert_eq!(back.params, b.params);
        assert_eq!(back.routes, b.routes);
        assert_eq!(back.sediment, b.sediment);
        assert_eq!(back.species, b.species);
        assert_eq!(back.network.fingerprint(), b.network.fingerprint());
        std::fs::remove_file(dir.path().join(NETWORK_FILE)).unwrap();
        let rebuilt = ModelBundle::load(dir.path()).unwrap();
        for (route, d) in &b.nis {
            assert_eq!(rebuilt.nis[route].mapped, d.mapped);
        }
        assert_eq!(rebuilt.network.fingerprint(), b.network.fingerprint());
    }

    #[test]
    fn refit_changes_only_the_nis_table() {
        let b = ModelBundle::default_bundle().unwrap();
        let mcmc = McmcConfig {
            iterations: 2_000,
            chains: 2,
            thin: 5,
            burn_in: 500,
            seed: 4,
        };
        let (fitted, post) = b
            .refit_nis(&PriorConfig::default(), &mcmc, SurvivalRule::Containment)
            .unwrap();
        assert_eq!(post.draws.len() as u64, mcmc.retained_draws());
        assert_eq!(fitted.nis.len(), 20);
        let before = b.network.to_doc();
        let after = fitted.network.to_doc();
        for (x, y) in before.cpts.iter().zip(&after.cpts) {
            if x.node != crate::model::catalog::NIS_VALUE {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn empty_dir_gives_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let b = ModelBundle::load(dir.path()).unwrap();
        assert_eq!(b.routes.len(), 20);
        assert_eq!(b.species.len(), 89);
    }
}
