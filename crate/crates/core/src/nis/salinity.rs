use std::path::Path;

use serde::{Deserialize, Serialize};

use super::area::Area;
use super::table::{split_row, TextTable};
use crate::error::ModelError;

pub const SALINITY_COLUMNS: [&str; 4] = ["area", "month", "x_min", "y_max"];

/// Monthly mean of the minimum and maximum surface salinity of one area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalinityObservation {
    pub area: Area,
    pub month: u32,
    pub x_min: f64,
    pub y_max: f64,
}

pub fn load_salinity(path: impl AsRef<Path>) -> Result<Vec<SalinityObservation>, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::io(path, e))?;
    parse_salinity(&text, &path.display().to_string())
}

pub fn parse_salinity(text: &str, origin: &str) -> Result<Vec<SalinityObservation>, ModelError> {
    let Some(table) = TextTable::parse(text, origin, &SALINITY_COLUMNS)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let err = |reason: String| ModelError::Parse {
            path: origin.to_string(),
            line: *line,
            reason,
        };
        let f = split_row(row, table.delimiter);
        if f.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", f.len())));
        }
        let area: Area = f[0].parse().map_err(err)?;
        let month = f[1].parse::<u32>().map_err(|_| err(format!("bad month `{}`", f[1])))?;
        let num = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
        let (Some(x_min), Some(y_max)) = (num(f[2]), num(f[3])) else {
            return Err(err("salinity values must be numbers".into()));
        };
        if !(0.0..=40.0).contains(&x_min) || !(0.0..=40.0).contains(&y_max) || x_min > y_max {
            return Err(ModelError::Validation(format!(
                "{origin}:{line}: need 0 <= x_min <= y_max <= 40, got {x_min}, {y_max}"
            )));
        }
        out.push(SalinityObservation {
            area,
            month,
            x_min,
            y_max,
        });
    }
    Ok(out)
}

pub fn format_salinity(obs: &[SalinityObservation]) -> String {
    let mut out = SALINITY_COLUMNS.join("\t");
    out.push('\n');
    for o in obs {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", o.area, o.month, o.x_min, o.y_max));
    }
    out
}
