//! Route catalog, sediment classification and per-route NIS tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::catalog::SedimentClass;
use crate::error::ModelError;
use crate::nis::table::{split_row, TextTable};
use crate::nis::{Area, RouteNisDistribution, NIS_STATES};

pub const ROUTE_COLUMNS: [&str; 4] = ["route", "departure", "arrival", "ice"];
pub const SEDIMENT_COLUMNS: [&str; 2] = ["route", "class"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub id: String,
    pub departure: Area,
    pub arrival: Area,
    /// Passes through waters with partial winter ice cover.
    pub ice: bool,
}

/// The twenty directed routes in state order.
pub fn default_routes() -> Vec<Route> {
    use Area::{
        BalticProper as BP, GulfOfBothnia as GoB, GulfOfFinland as GoF, GulfOfRiga as GoR, NorthSea as NS,
        SouthwesternBaltic as SWB,
    };
    let pairs = [
        (NS, SWB),
        (NS, GoF),
        (NS, GoB),
        (SWB, BP),
        (SWB, GoR),
        (GoF, BP),
        (GoF, GoF),
        (SWB, BP),
        (SWB, BP),
        (SWB, SWB),
    ];
    let ice_routes = [2, 3, 5, 6, 7];
    let mut out = Vec::with_capacity(20);
    for (i, (a, b)) in pairs.into_iter().enumerate() {
        let n = i + 1;
        let ice = ice_routes.contains(&n);
        out.push(Route {
            id: format!("{n}A"),
            departure: a,
            arrival: b,
            ice,
        });
        out.push(Route {
            id: format!("{n}B"),
            departure: b,
            arrival: a,
            ice,
        });
    }
    out
}

/// Sediment copper class of each route's arrival port.
pub fn default_sediment() -> BTreeMap<String, SedimentClass> {
    const HIGH: [&str; 10] = ["1A", "3A", "4A", "4B", "5B", "6A", "8B", "9B", "10A", "10B"];
    default_routes()
        .into_iter()
        .map(|r| {
            let class = if HIGH.contains(&r.id.as_str()) {
                SedimentClass::High
            } else {
                SedimentClass::Low
            };
            (r.id, class)
        })
        .collect()
}

/// Point-mass NIS values per route as printed with the network.
pub fn default_nis_values() -> Vec<(&'static str, f64)> {
    vec![
        ("1A", 53.0),
        ("1B", 31.0),
        ("2A", 33.0),
        ("2B", 3.0),
        ("3A", 36.0),
        ("3B", 1.0),
        ("4A", 17.0),
        ("4B", 10.0),
        ("5A", 17.0),
        ("5B", 3.0),
        ("6A", 7.0),
        ("6B", 15.0),
        ("7A", 7.0),
        ("7B", 7.0),
        ("8A", 18.0),
        ("8B", 9.0),
        ("9A", 17.0),
        ("9B", 10.0),
        ("10A", 32.0),
        ("10B", 30.0),
    ]
}

pub fn default_nis() -> BTreeMap<String, RouteNisDistribution> {
    default_nis_values()
        .into_iter()
        .map(|(r, v)| {
            (
                r.to_string(),
                RouteNisDistribution::point(r, v).expect("default values are states"),
            )
        })
        .collect()
}

fn parse_err(origin: &str, line: usize, reason: String) -> ModelError {
    ModelError::Parse {
        path: origin.to_string(),
        line,
        reason,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "yes" | "y" | "true" | "1" => Some(true),
        "no" | "n" | "false" | "0" => Some(false),
        _ => None,
    }
}

pub fn parse_routes(text: &str, origin: &str) -> Result<Vec<Route>, ModelError> {
    let Some(table) = TextTable::parse(text, origin, &ROUTE_COLUMNS)? else {
        return Err(parse_err(origin, 1, "route catalog is empty".into()));
    };
    let mut out: Vec<Route> = Vec::new();
    for (line, row) in &table.rows {
        let f = split_row(row, table.delimiter);
        if f.len() != 4 {
            return Err(parse_err(
                origin,
                *line,
                format!("expected 4 fields, found {}", f.len()),
            ));
        }
        let area = |s: &str| s.parse::<Area>().map_err(|e| parse_err(origin, *line, e));
        let ice = parse_bool(f[3]).ok_or_else(|| parse_err(origin, *line, format!("bad ice flag `{}`", f[3])))?;
        if out.iter().any(|r| r.id == f[0]) {
            return Err(parse_err(origin, *line, format!("duplicate route `{}`", f[0])));
        }
        out.push(Route {
            id: f[0].to_string(),
            departure: area(f[1])?,
            arrival: area(f[2])?,
            ice,
        });
    }
    Ok(out)
}

pub fn format_routes(routes: &[Route]) -> String {
    let mut s = format!("{}\n", ROUTE_COLUMNS.join("\t"));
    for r in routes {
        s += &format!(
            "{}\t{}\t{}\t{}\n",
            r.id,
            r.departure.code(),
            r.arrival.code(),
            if r.ice { "yes" } else { "no" }
        );
    }
    s
}

pub fn parse_sediment(text: &str, origin: &str) -> Result<BTreeMap<String, SedimentClass>, ModelError> {
    let Some(table) = TextTable::parse(text, origin, &SEDIMENT_COLUMNS)? else {
        return Ok(BTreeMap::new());
    };
    let mut out = BTreeMap::new();
    for (line, row) in &table.rows {
        let f = split_row(row, table.delimiter);
        if f.len() != 2 {
            return Err(parse_err(
                origin,
                *line,
                format!("expected 2 fields, found {}", f.len()),
            ));
        }
        let class = match f[1].to_ascii_lowercase().as_str() {
            "low" => SedimentClass::Low,
            "high" => SedimentClass::High,
            other => {
                return Err(parse_err(
                    origin,
                    *line,
                    format!("sediment class must be low or high, not `{other}`"),
                ))
            }
        };
        out.insert(f[0].to_string(), class);
    }
    Ok(out)
}

pub fn format_sediment(routes: &[Route], classes: &BTreeMap<String, SedimentClass>) -> String {
    let mut s = format!(
        "# copper class of the arrival port sediment; high means at or above the threshold\n{}\n",
        SEDIMENT_COLUMNS.join("\t")
    );
    for r in routes {
        if let Some(c) = classes.get(&r.id) {
            let c = match c {
                SedimentClass::Low => "low",
                SedimentClass::High => "high",
            };
            s += &format!("{}\t{c}\n", r.id);
        }
    }
    s
}

fn nis_columns() -> Vec<String> {
    std::iter::once("route".to_string())
        .chain(NIS_STATES.iter().map(|v| format!("p{v}")))
        .collect()
}

/// Reads `route, p1, p3, ...`: one probability row per route over the NIS states.
pub fn parse_nis(text: &str, origin: &str) -> Result<BTreeMap<String, RouteNisDistribution>, ModelError> {
    let cols = nis_columns();
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let Some(table) = TextTable::parse(text, origin, &cols)? else {
        return Ok(BTreeMap::new());
    };
    let mut out = BTreeMap::new();
    for (line, row) in &table.rows {
        let f = split_row(row, table.delimiter);
        if f.len() != cols.len() {
            return Err(parse_err(
                origin,
                *line,
                format!("expected {} fields, found {}", cols.len(), f.len()),
            ));
        }
        let mapped = f[1..]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(origin, *line, format!("bad probability `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sum: f64 = mapped.iter().sum();
        if mapped.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-6 {
            return Err(parse_err(
                origin,
                *line,
                format!("probabilities must be nonnegative and sum to 1 (sum {sum})"),
            ));
        }
        let mapped: Vec<f64> = mapped.iter().map(|p| p / sum).collect();
        // survivor counts are not stored; the mapped states stand in for them
        let top = *NIS_STATES.last().unwrap() as usize;
        let mut counts = vec![0.0; top + 1];
        for (p, v) in mapped.iter().zip(NIS_STATES) {
            counts[v as usize] += p;
        }
        out.insert(
            f[0].to_string(),
            RouteNisDistribution {
                route: f[0].to_string(),
                counts,
                mapped,
            },
        );
    }
    Ok(out)
}

pub fn format_nis(routes: &[Route], nis: &BTreeMap<String, RouteNisDistribution>) -> String {
    let mut s = format!("{}\n", nis_columns().join("\t"));
    for r in routes {
        if let Some(d) = nis.get(&r.id) {
            s += &r.id;
            for p in &d.mapped {
                s += &format!("\t{p}");
            }
            s.push('\n');
        }
    }
    s
}
