use std::process::{Command, Output};

use serde_json::Value;

fn dst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dst"))
        .args(args)
        .output()
        .expect("dst runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TANKER: [&str; 8] = [
    "--lock",
    "ShipType=tanker",
    "--lock",
    "FuelType=heavy",
    "--lock",
    "CoatingType=hard",
    "--lock",
    "Routes=2A",
];

#[test]
fn validate_reports_counts() {
    let o = dst(&["validate"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(
        s.starts_with("ok: 11 decisions, 14 chance nodes, 9 utilities; 20 routes, 89 species"),
        "{s}"
    );
}

#[test]
fn query_exit_codes() {
    assert_eq!(dst(&["query", "--utilities-only"]).status.code(), Some(0));
    let o = dst(&["query", "--lock", "Routes=3A", "--lock", "CoatingType=fouling-release"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("INCONSISTENT"));
    let o = dst(&["query", "--lock", "Route=3A"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("Routes"),
        "suggests the right node"
    );
    assert_eq!(dst(&["query", "--lock", "no-equals-sign"]).status.code(), Some(1));
}

#[test]
fn tanker_cleaning_costs_in_json() {
    let mut args = vec!["query", "--json", "--lock", "IWCcollect=IWC+collect"];
    args.extend(TANKER);
    let o = dst(&args);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let iwc = v["utilities"]["IWCCost"].as_f64().unwrap();
    assert!((iwc + 128450.25).abs() < 0.05, "{iwc}");
    assert_eq!(v["model_version"].as_str().unwrap().len(), 12);
    assert_eq!(v["posteriors"]["ShipType"][5], 1.0);
}

#[test]
fn show_limits_posteriors() {
    let o = dst(&["query", "--show", "NISvalue"]);
    let s = stdout(&o);
    assert!(s.contains("NISvalue ("));
    assert!(!s.contains("WSA ("));
    assert_eq!(dst(&["query", "--show", "Nope"]).status.code(), Some(1));
}

#[test]
fn export_cpt_prints_anchor_rows() {
    let o = dst(&["export-cpt", "--node", "BiofoulingAvg"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    let header = lines.next().unwrap();
    assert!(
        header.starts_with("CoatingType\tTimeSinceCoating\tIWCtimes\t"),
        "{header}"
    );
    let first: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(&first[3..], ["1", "0", "0", "0", "0", "0"]);
    assert_eq!(s.lines().count(), 1 + 3 * 5 * 4);

    let o = dst(&["export-cpt", "--node", "EcotoxRisk"]);
    assert!(stdout(&o).lines().last().unwrap().ends_with("-42500"));
    let o = dst(&["export-cpt", "--node", "WSA", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["node"], "WSA");
    assert_eq!(dst(&["export-cpt", "--node", "Nope"]).status.code(), Some(1));
}

#[test]
fn compare_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"[{"locks":{"IWCcollect":"IWC+collect"}},{"locks":{"IWCcollect":"IWC+no-collect"}},{"locks":{"Routes":"3A","CoatingType":"fouling-release"}}]"#,
    )
    .unwrap();
    let o = dst(&["compare", "--json", "--scenario-file", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["consistent"], false);
    let o = dst(&["compare", "--scenario-file", path.to_str().unwrap()]);
    assert!(stdout(&o).contains("inconsistent"));
}

#[test]
fn bundle_round_trips_through_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model");
    assert!(dst(&["bundle", "init", "--out", model.to_str().unwrap()])
        .status
        .success());
    let builtin = stdout(&dst(&["validate"]));
    let loaded = stdout(&dst(&["validate", "--model-dir", model.to_str().unwrap()]));
    assert_eq!(builtin, loaded);
    assert_eq!(dst(&["validate", "--model-dir", "/nonexistent"]).status.code(), Some(1));
}

#[test]
fn nis_fit_writes_draws_and_routes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("draws.tsv");
    let nis = dir.path().join("nis.tsv");
    let o = dst(&[
        "nis",
        "fit",
        "--iters",
        "3000",
        "--chains",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--nis-out",
        nis.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("3600 draws (2 chains)"), "{}", stdout(&o));
    let draws = std::fs::read_to_string(&out).unwrap();
    assert_eq!(draws.lines().count(), 1 + 3600);
    let routes = std::fs::read_to_string(&nis).unwrap();
    assert_eq!(routes.lines().filter(|l| !l.starts_with('#')).count(), 1 + 20);
}
