use dst_core::{query, LockSet, ModelBundle};
use dst_wasm::Model;
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn catalog_lists_decisions_and_utilities() {
    let m = Model::load().unwrap();
    let c = parse(&m.catalog_json());
    let nodes = c["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 25);
    assert_eq!(nodes.iter().filter(|n| n["decision"] == true).count(), 11);
    assert_eq!(c["utilities"].as_array().unwrap().len(), 9);
    assert_eq!(c["model_version"], m.version());
}

#[test]
fn query_matches_the_engine() {
    let m = Model::load().unwrap();
    let locks = LockSet::new().with("Routes", "2A").with("IWCcollect", "IWC+collect");
    let got = parse(&m.query_json(r#"{"Routes":"2A","IWCcollect":"IWC+collect"}"#).unwrap());
    let wrapped = parse(&m.query_json(&serde_json::to_string(&locks).unwrap()).unwrap());
    assert_eq!(got, wrapped);
    let want = query(&ModelBundle::default_bundle().unwrap().network, &locks).unwrap();
    assert_eq!(got["utilities"]["NISRisk"].as_f64().unwrap(), want.utilities["NISRisk"]);
    assert_eq!(got["consistent"], true);
    assert!(m.query_json("{").is_err());
    assert!(m.query_json(r#"{"Routes":"99Z"}"#).unwrap_err().contains("Routes"));
}

#[test]
fn sweep_over_cleaning_modes_keeps_the_order() {
    let m = Model::load().unwrap();
    let s = parse(
        &m.sweep_json(r#"{"ShipType":"tanker","Routes":"2A"}"#, "IWCcollect")
            .unwrap(),
    );
    let rows = s["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let risk = |state: &str| {
        let r = rows.iter().find(|r| r["state"] == state).unwrap();
        r["utilities"]["NISRisk"].as_f64().unwrap().abs()
    };
    assert!(risk("IWC+collect") < risk("no-IWC"));
    assert!(risk("no-IWC") < risk("IWC+no-collect"));
    assert!(m.sweep_json("{}", "WSA").is_err());
}

#[test]
fn sweep_flags_fouling_release_on_ice_routes() {
    let m = Model::load().unwrap();
    let s = parse(&m.sweep_json(r#"{"Routes":"3A"}"#, "CoatingType").unwrap());
    let fr = s["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["state"] == "fouling-release")
        .unwrap()
        .clone();
    assert_eq!(fr["consistent"], false);
}

#[test]
fn compare_and_route_distributions() {
    let m = Model::load().unwrap();
    let c = parse(
        &m.compare_json(r#"[{"locks":{"CoatingType":"biocidal"}},{"locks":{"CoatingType":"hard"}}]"#)
            .unwrap(),
    );
    assert_eq!(c["rows"].as_array().unwrap().len(), 2);
    let r = parse(&m.route_nis_json("1A").unwrap());
    let p: f64 = r["p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((p - 1.0).abs() < 1e-9);
    assert_eq!(r["states"].as_array().unwrap().len(), 14);
    assert!(m.route_nis_json("0Q").is_err());
}
