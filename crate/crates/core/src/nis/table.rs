//! Minimal reader for the delimiter-separated data files.

use crate::error::ModelError;

pub(crate) struct TextTable<'a> {
    pub delimiter: char,
    /// Data rows with their 1-based line numbers.
    pub rows: Vec<(usize, &'a str)>,
}

impl<'a> TextTable<'a> {
    /// Skips blank and `#` lines, checks the header against `columns`
    /// (case-insensitive) and returns the remaining rows. `None` when the
    /// text holds no header at all.
    pub fn parse(text: &'a str, origin: &str, columns: &[&str]) -> Result<Option<TextTable<'a>>, ModelError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let Some((hline, header)) = lines.next() else {
            return Ok(None);
        };
        let delimiter = if header.contains('\t') { '\t' } else { ',' };
        let names = split_row(header, delimiter);
        let matches = names.len() == columns.len() && names.iter().zip(columns).all(|(a, b)| a.eq_ignore_ascii_case(b));
        if !matches {
            return Err(ModelError::Parse {
                path: origin.to_string(),
                line: hline,
                reason: format!("header must be `{}`", columns.join(",")),
            });
        }
        Ok(Some(TextTable {
            delimiter,
            rows: lines.collect(),
        }))
    }
}

pub(crate) fn split_row(row: &str, delimiter: char) -> Vec<&str> {
    row.split(delimiter).map(str::trim).collect()
}
