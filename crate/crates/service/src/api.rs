//! Request and response bodies, and the pure functions that produce them.
//! The CLI calls the same functions so its JSON output matches the service.

use dst_core::factor::StateSpace;
use dst_core::model::SedimentClass;
use dst_core::nis::{McmcConfig, PriorConfig, SurvivalRule};
use dst_core::query::ComparisonRow;
use dst_core::{compare_scenarios, query, LockSet, ModelBundle, QueryError, ScenarioResult};
use serde::{Deserialize, Serialize};

/// Response header carrying the model version used for the response.
pub const VERSION_HEADER: &str = "x-model-version";

/// Version tag of a model: the network fingerprint.
pub fn model_version(bundle: &ModelBundle) -> String {
    bundle.network.fingerprint()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub model_version: String,
    #[serde(flatten)]
    pub result: ScenarioResult,
}

pub fn query_response(bundle: &ModelBundle, version: &str, locks: &LockSet) -> Result<QueryResponse, QueryError> {
    Ok(QueryResponse {
        model_version: version.to_string(),
        result: query(&bundle.network, locks)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRequest {
    pub scenarios: Vec<LockSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareResponse {
    pub model_version: String,
    pub utilities: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_response(
    bundle: &ModelBundle,
    version: &str,
    scenarios: &[LockSet],
) -> Result<CompareResponse, QueryError> {
    let cmp = compare_scenarios(&bundle.network, scenarios)?;
    let units = cmp
        .utilities
        .iter()
        .map(|u| bundle.network.utility(u).map(|n| n.units.clone()).unwrap_or_default())
        .collect();
    Ok(CompareResponse {
        model_version: version.to_string(),
        utilities: cmp.utilities,
        units,
        rows: cmp.rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Decision,
    Chance,
    Utility,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptMeta {
    pub reconstructed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reconstructed_columns: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// Nodes the admissible states depend on.
    pub depends_on: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub id: String,
    pub name: String,
    pub kind: NodeKind,
    /// State labels; empty for utilities.
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<f64>>,
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<CptMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissibility: Option<Admissibility>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCatalog {
    pub model_version: String,
    pub nodes: Vec<NodeInfo>,
}

pub fn model_catalog(bundle: &ModelBundle, version: &str) -> ModelCatalog {
    let doc = bundle.network.to_doc();
    let mut nodes: Vec<NodeInfo> = doc
        .variables
        .iter()
        .map(|v| {
            let (values, boundaries) = match &v.states {
                StateSpace::Labeled(_) => (None, None),
                StateSpace::Numbered(xs) => (Some(xs.clone()), None),
                StateSpace::Interval(b) => (None, Some(b.clone())),
            };
            let cpt = doc.cpts.iter().find(|c| c.node == v.id).map(|c| CptMeta {
                reconstructed: c.reconstructed,
                reconstructed_columns: c.reconstructed_columns.clone(),
                source: c.source.clone(),
            });
            let admissibility = doc.constraints.iter().find(|c| c.node == v.id).map(|c| Admissibility {
                depends_on: c.scope.iter().filter(|s| **s != v.id).cloned().collect(),
                reason: c.reason.clone(),
            });
            NodeInfo {
                id: v.id.clone(),
                name: v.name.clone(),
                kind: match v.kind {
                    dst_core::VariableKind::Decision => NodeKind::Decision,
                    dst_core::VariableKind::Chance => NodeKind::Chance,
                },
                states: v.states.labels(),
                values,
                boundaries,
                parents: v.parents.clone(),
                units: v.units.clone(),
                cpt,
                admissibility,
            }
        })
        .collect();
    nodes.extend(doc.utilities.iter().map(|u| NodeInfo {
        id: u.id.clone(),
        name: u.name.clone(),
        kind: NodeKind::Utility,
        states: Vec::new(),
        values: None,
        boundaries: None,
        parents: u.parents.clone(),
        units: Some(u.units.clone()),
        cpt: None,
        admissibility: None,
    }));
    ModelCatalog {
        model_version: version.to_string(),
        nodes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteInfo {
    pub id: String,
    pub departure: String,
    pub arrival: String,
    pub ice: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sediment: Option<SedimentClass>,
    /// Probability of each NIS-value state.
    pub nis: Vec<f64>,
    pub expected_nis: f64,
}

pub fn route_catalog(bundle: &ModelBundle) -> Vec<RouteInfo> {
    bundle
        .routes
        .iter()
        .map(|r| {
            let nis = bundle.nis.get(&r.id);
            RouteInfo {
                id: r.id.clone(),
                departure: r.departure.code().to_string(),
                arrival: r.arrival.code().to_string(),
                ice: r.ice,
                sediment: bundle.sediment.get(&r.id).copied(),
                nis: nis.map(|d| d.mapped.clone()).unwrap_or_default(),
                expected_nis: nis.map(|d| d.expected_mapped()).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RefitRequest {
    #[serde(default)]
    pub mcmc: Option<McmcConfig>,
    #[serde(default)]
    pub prior: Option<PriorConfig>,
    #[serde(default)]
    pub rule: Option<SurvivalRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Running,
    Done,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobStatus {
    pub id: String,
    pub state: JobState,
    pub started_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<String>,
    pub mcmc: McmcConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Version of the model installed by this job.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rhat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewScenario {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub locks: LockSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}
