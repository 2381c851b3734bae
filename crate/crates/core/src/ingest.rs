//! Loading `chants.csv` and `sources.csv` snapshots with per-row diagnostics.
//!
//! Columns are matched by header name, so column order may vary between
//! snapshot versions. Every cell is trimmed before validation. A row that is
//! missing a required value is dropped and reported as an `Error`; anything
//! else suspicious is a `Warning` and the row is kept.
//!
//! Row numbers count data records from 1; issues about the header use row 0.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{ChantField, SourceField};
use crate::model::{opt, Chant, Cursus, Source};
use crate::table;

pub const DEFAULT_MAX_FIELD_LEN: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "Error",
            Severity::Warning => "Warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestIssue {
    pub row_number: u64,
    pub field: String,
    pub severity: Severity,
    pub message: String,
}

impl IngestIssue {
    fn error(row_number: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        IngestIssue {
            row_number,
            field: field.into(),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(row_number: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        IngestIssue {
            row_number,
            field: field.into(),
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for IngestIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "row {}: {} in `{}`: {}",
            self.row_number, self.severity, self.field, self.message
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("malformed CSV{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    MalformedCsv { line: Option<u64>, message: String },
    #[error("required column `{0}` is missing from the header")]
    MissingColumn(String),
}

impl IngestError {
    fn malformed(line: Option<u64>, message: impl Into<String>) -> Self {
        IngestError::MalformedCsv {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Longest accepted cell, in characters.
    pub max_field_len: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            max_field_len: DEFAULT_MAX_FIELD_LEN,
        }
    }
}

pub fn parse_chants_csv(data: &[u8]) -> Result<(Vec<Chant>, Vec<IngestIssue>), IngestError> {
    parse_chants_csv_with(data, &IngestOptions::default())
}

pub fn parse_sources_csv(data: &[u8]) -> Result<(Vec<Source>, Vec<IngestIssue>), IngestError> {
    parse_sources_csv_with(data, &IngestOptions::default())
}

pub fn parse_chants_csv_with(
    data: &[u8],
    options: &IngestOptions,
) -> Result<(Vec<Chant>, Vec<IngestIssue>), IngestError> {
    let mut chants = Vec::new();
    let issues = parse_table(data, options, ChantField::ALL, |row, cells, issues| {
        let mut chant = Chant::default();
        let mut ok = true;
        for (field, value) in cells {
            let Some(value) = value else { continue };
            if field.is_required() && value.is_empty() {
                issues.push(IngestIssue::error(row, field.as_str(), "required value is empty"));
                ok = false;
            }
            chant.set(*field, Some(value.to_string()));
        }
        if ok {
            chants.push(chant);
        }
        ok
    })?;
    Ok((chants, issues))
}

pub fn parse_sources_csv_with(
    data: &[u8],
    options: &IngestOptions,
) -> Result<(Vec<Source>, Vec<IngestIssue>), IngestError> {
    let mut sources = Vec::new();
    let issues = parse_table(data, options, SourceField::ALL, |row, cells, issues| {
        let mut source = Source::default();
        let mut ok = true;
        for (field, value) in cells {
            let Some(value) = value else { continue };
            if field.is_required() && value.is_empty() {
                issues.push(IngestIssue::error(row, field.as_str(), "required value is empty"));
                ok = false;
                continue;
            }
            match field {
                SourceField::Title => source.title = opt(*value),
                SourceField::Siglum => source.siglum = value.to_string(),
                SourceField::Century => source.century = opt(*value),
                SourceField::Provenance => source.provenance = opt(*value),
                SourceField::Srclink => source.srclink = value.to_string(),
                SourceField::Cursus => {
                    source.cursus = opt(*value).map(|v| {
                        let (cursus, normalized) = Cursus::parse(&v);
                        if normalized {
                            issues.push(IngestIssue::warning(
                                row,
                                "cursus",
                                format!("`{v}` normalized to `{cursus}`"),
                            ));
                        } else if let Cursus::Other(_) = cursus {
                            issues.push(IngestIssue::warning(
                                row,
                                "cursus",
                                format!("`{v}` is neither Secular nor Monastic; kept verbatim"),
                            ));
                        }
                        cursus
                    })
                }
                SourceField::NumCentury => {
                    source.num_century = if value.is_empty() {
                        None
                    } else {
                        match parse_century_number(value) {
                            Some(n) => Some(n),
                            None => {
                                issues.push(IngestIssue::warning(
                                    row,
                                    "num_century",
                                    format!("`{value}` is not a century between 1 and 21; dropped"),
                                ));
                                None
                            }
                        }
                    }
                }
            }
        }
        if ok {
            sources.push(source);
        }
        ok
    })?;
    Ok((sources, issues))
}

/// Accepts integers and integral floats (`13`, `13.0`) within 1..=21.
fn parse_century_number(value: &str) -> Option<u32> {
    let n = match value.parse::<u32>() {
        Ok(n) => n,
        Err(_) => {
            let f: f64 = value.parse().ok()?;
            if f.fract() != 0.0 || !(0.0..=100.0).contains(&f) {
                return None;
            }
            f as u32
        }
    };
    (1..=21).contains(&n).then_some(n)
}

type Cells<'a, F> = Vec<(F, Option<&'a str>)>;

/// Drives the CSV reader. `build` receives one row's cells for the known
/// columns (`None` when the column is absent from the header) and returns
/// whether the row was accepted.
fn parse_table<F, B>(
    data: &[u8],
    options: &IngestOptions,
    columns: &'static [F],
    mut build: B,
) -> Result<Vec<IngestIssue>, IngestError>
where
    F: Copy + fmt::Display + Eq + std::str::FromStr + RequiredColumn,
    B: FnMut(u64, &Cells<'_, F>, &mut Vec<IngestIssue>) -> bool,
{
    let text = std::str::from_utf8(data)
        .map_err(|e| IngestError::malformed(None, format!("invalid UTF-8 at byte {}", e.valid_up_to())))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(IngestError::malformed(None, "missing header"));
    }
    if text.bytes().filter(|b| *b == b'"').count() % 2 == 1 {
        return Err(IngestError::malformed(None, "unbalanced quotes"));
    }

    let mut reader = table::reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::malformed(Some(1), e.to_string()))?
        .clone();

    let mut issues = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        let name = name.trim();
        if name.parse::<F>().is_err() {
            issues.push(IngestIssue::warning(0, name, "unknown column ignored"));
            continue;
        }
        if index.insert(name.to_string(), i).is_some() {
            issues.push(IngestIssue::warning(0, name, "duplicate column; last one wins"));
        }
    }
    for col in columns {
        if col.required() && !index.contains_key(&col.to_string()) {
            return Err(IngestError::MissingColumn(col.to_string()));
        }
    }
    let positions: Vec<(F, Option<usize>)> = columns
        .iter()
        .map(|c| (*c, index.get(&c.to_string()).copied()))
        .collect();

    let mut record = csv::StringRecord::new();
    let mut row = 0u64;
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line());
                return Err(IngestError::malformed(line, e.to_string()));
            }
        }
        row += 1;
        let cells: Cells<'_, F> = positions
            .iter()
            .map(|(f, pos)| (*f, pos.map(|p| record.get(p).unwrap_or("").trim())))
            .collect();
        if let Some((f, len)) = cells.iter().find_map(|(f, v)| {
            let len = v.map(|v| v.chars().count()).unwrap_or(0);
            (len > options.max_field_len).then_some((*f, len))
        }) {
            issues.push(IngestIssue::error(
                row,
                f.to_string(),
                format!("{len} characters exceeds the limit of {}", options.max_field_len),
            ));
            continue;
        }
        build(row, &cells, &mut issues);
    }
    Ok(issues)
}

trait RequiredColumn {
    fn required(&self) -> bool;
}

impl RequiredColumn for ChantField {
    fn required(&self) -> bool {
        self.is_required()
    }
}

impl RequiredColumn for SourceField {
    fn required(&self) -> bool {
        self.is_required()
    }
}

/// Issues as CSV: `row_number,field,severity,message`.
pub fn issues_csv(issues: &[IngestIssue]) -> Vec<u8> {
    table::write_rows(
        &["row_number", "field", "severity", "message"],
        issues.iter().map(|i| {
            [
                i.row_number.to_string(),
                i.field.clone(),
                i.severity.to_string(),
                i.message.clone(),
            ]
        }),
    )
}
