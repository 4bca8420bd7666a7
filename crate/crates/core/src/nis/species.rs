use std::path::Path;

use serde::{Deserialize, Serialize};

use super::area::Area;
use super::table::{split_row, TextTable};
use crate::error::ModelError;

/// Column header of a species file.
pub const SPECIES_COLUMNS: [&str; 9] = [
    "name",
    "sal_min_tol",
    "sal_max_tol",
    "present_GoB",
    "present_GoF",
    "present_GoR",
    "present_BP",
    "present_SWB",
    "present_NS",
];

/// Salinity tolerance and area presence of one non-indigenous species.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub name: String,
    pub sal_min_tol: f64,
    pub sal_max_tol: f64,
    /// Presence flags in [`Area::ALL`] order.
    pub presence: [bool; 6],
}

impl SpeciesRecord {
    pub fn present_in(&self, area: Area) -> bool {
        self.presence[area.index()]
    }
}

pub fn load_species_table(path: impl AsRef<Path>) -> Result<Vec<SpeciesRecord>, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::io(path, e))?;
    parse_species_table(&text, &path.display().to_string())
}

/// Parses a tab- or comma-separated species table. `origin` names the
/// source in error messages.
pub fn parse_species_table(text: &str, origin: &str) -> Result<Vec<SpeciesRecord>, ModelError> {
    let Some(table) = TextTable::parse(text, origin, &SPECIES_COLUMNS)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let fields = split_row(row, table.delimiter);
        let err = |reason: String| ModelError::Parse {
            path: origin.to_string(),
            line: *line,
            reason,
        };
        if fields.len() != SPECIES_COLUMNS.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                SPECIES_COLUMNS.len(),
                fields.len()
            )));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("{} is not a number: `{}`", SPECIES_COLUMNS[i], fields[i])))
        };
        let (lo, hi) = (num(1)?, num(2)?);
        if lo < 0.0 || lo > hi {
            return Err(ModelError::Validation(format!(
                "{origin}:{line}: species `{}` has tolerance [{lo}, {hi}]",
                fields[0]
            )));
        }
        let mut presence = [false; 6];
        for (k, flag) in presence.iter_mut().enumerate() {
            *flag = match fields[3 + k].to_ascii_lowercase().as_str() {
                "yes" | "y" | "true" | "1" => true,
                "no" | "n" | "false" | "0" => false,
                other => {
                    return Err(err(format!(
                        "{}: expected yes/no, found `{other}`",
                        SPECIES_COLUMNS[3 + k]
                    )))
                }
            };
        }
        out.push(SpeciesRecord {
            name: fields[0].to_string(),
            sal_min_tol: lo,
            sal_max_tol: hi,
            presence,
        });
    }
    Ok(out)
}

/// Writes species back in the file format.
pub fn format_species_table(species: &[SpeciesRecord]) -> String {
    let mut out = SPECIES_COLUMNS.join("\t");
    out.push('\n');
    for s in species {
        out.push_str(&format!("{}\t{}\t{}", s.name, s.sal_min_tol, s.sal_max_tol));
        for p in s.presence {
            out.push_str(if p { "\tyes" } else { "\tno" });
        }
        out.push('\n');
    }
    out
}
