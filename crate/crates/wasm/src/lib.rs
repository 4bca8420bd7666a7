//! Browser bindings. Everything crosses the boundary as JSON text so the
//! page can use plain `JSON.parse`.

use dst_core::{compare_scenarios, query, sweep_decision, LockSet, ModelBundle, VariableKind};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct NodeSummary<'a> {
    id: &'a str,
    name: &'a str,
    decision: bool,
    states: Vec<String>,
}

#[derive(Serialize)]
struct UtilitySummary<'a> {
    id: &'a str,
    name: &'a str,
    units: &'a str,
}

/// The built-in model, loaded once per page.
#[wasm_bindgen]
pub struct Model {
    bundle: ModelBundle,
    version: String,
}

impl Model {
    pub fn load() -> Result<Model, String> {
        let bundle = ModelBundle::default_bundle().map_err(|e| e.to_string())?;
        let version = bundle.network.fingerprint();
        Ok(Model { bundle, version })
    }

    /// Nodes and utilities for building the lock panel.
    pub fn catalog_json(&self) -> String {
        let net = &self.bundle.network;
        let nodes: Vec<NodeSummary> = net
            .variables()
            .iter()
            .map(|v| NodeSummary {
                id: &v.id,
                name: &v.name,
                decision: v.kind == VariableKind::Decision,
                states: v.states.labels(),
            })
            .collect();
        let utilities: Vec<UtilitySummary> = net
            .utilities()
            .iter()
            .map(|u| UtilitySummary {
                id: &u.id,
                name: &u.name,
                units: &u.units,
            })
            .collect();
        json!({ "model_version": self.version, "nodes": nodes, "utilities": utilities }).to_string()
    }

    /// Same body as the service's query endpoint.
    pub fn query_json(&self, locks: &str) -> Result<String, String> {
        let locks = parse_locks(locks)?;
        let r = query(&self.bundle.network, &locks).map_err(|e| e.to_string())?;
        let mut v = serde_json::to_value(&r).map_err(|e| e.to_string())?;
        v["model_version"] = json!(self.version);
        Ok(v.to_string())
    }

    /// Expected utilities for every state of one decision.
    pub fn sweep_json(&self, locks: &str, decision: &str) -> Result<String, String> {
        let locks = parse_locks(locks)?;
        let rows = sweep_decision(&self.bundle.network, &locks, decision).map_err(|e| e.to_string())?;
        let rows: Vec<Value> = rows
            .into_iter()
            .map(|(state, r)| json!({ "state": state, "consistent": r.consistent, "reason": r.reason, "utilities": r.utilities }))
            .collect();
        Ok(json!({ "decision": decision, "rows": rows }).to_string())
    }

    /// Side-by-side expected utilities for a list of lock sets.
    pub fn compare_json(&self, scenarios: &str) -> Result<String, String> {
        let scenarios: Vec<LockSet> = serde_json::from_str(scenarios).map_err(|e| format!("bad scenario list: {e}"))?;
        let c = compare_scenarios(&self.bundle.network, &scenarios).map_err(|e| e.to_string())?;
        serde_json::to_string(&c).map_err(|e| e.to_string())
    }

    /// NIS-value distribution of one route.
    pub fn route_nis_json(&self, route: &str) -> Result<String, String> {
        let r = self
            .bundle
            .routes
            .iter()
            .find(|r| r.id == route)
            .ok_or_else(|| format!("unknown route `{route}`"))?;
        let d = self
            .bundle
            .nis
            .get(route)
            .ok_or_else(|| format!("no NIS distribution for `{route}`"))?;
        Ok(json!({
            "route": r.id,
            "departure": r.departure.code(),
            "arrival": r.arrival.code(),
            "ice": r.ice,
            "states": dst_core::nis::NIS_STATES,
            "p": d.mapped,
            "expected": d.expected_mapped(),
        })
        .to_string())
    }
}

/// Accepts either `{"locks": {...}}` or a bare `{...}` map.
fn parse_locks(text: &str) -> Result<LockSet, String> {
    let text = if text.trim().is_empty() { "{}" } else { text };
    let v: Value = serde_json::from_str(text).map_err(|e| format!("bad lock JSON: {e}"))?;
    let v = match v.get("locks") {
        Some(_) => v,
        None => json!({ "locks": v }),
    };
    serde_json::from_value(v).map_err(|e| format!("bad lock set: {e}"))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
impl Model {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Model, JsError> {
        Model::load().map_err(|e| JsError::new(&e))
    }

    pub fn version(&self) -> String {
        self.version.clone()
    }

    pub fn catalog(&self) -> String {
        self.catalog_json()
    }

    pub fn query(&self, locks: &str) -> Result<String, JsError> {
        js(self.query_json(locks))
    }

    pub fn sweep(&self, locks: &str, decision: &str) -> Result<String, JsError> {
        js(self.sweep_json(locks, decision))
    }

    pub fn compare(&self, scenarios: &str) -> Result<String, JsError> {
        js(self.compare_json(scenarios))
    }

    #[wasm_bindgen(js_name = routeNis)]
    pub fn route_nis(&self, route: &str) -> Result<String, JsError> {
        js(self.route_nis_json(route))
    }
}
