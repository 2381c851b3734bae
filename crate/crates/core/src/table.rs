//! The CSV dialect shared by every table this crate reads or writes:
//! comma separated, double-quote quoting with doubled embedded quotes,
//! mandatory header, UTF-8, CRLF or LF accepted on input, LF on output.

use csv::{QuoteStyle, Reader, ReaderBuilder, Terminator, Writer, WriterBuilder};
use thiserror::Error;

use crate::fields::{ChantField, SourceField};
use crate::model::{Chant, Source};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
}

/// Trimmed cells of the named `columns` from a headed CSV, one `Vec` per row.
/// A column name ending in `?` is optional and reads as empty when absent.
pub fn read_columns(data: &[u8], columns: &[&str]) -> Result<Vec<Vec<String>>, TableError> {
    let mut reader = reader(data);
    let header = reader
        .headers()
        .map_err(|e| TableError::Malformed(e.to_string()))?
        .clone();
    let positions = columns
        .iter()
        .map(|c| match c.strip_suffix('?') {
            Some(name) => Ok(header.iter().position(|h| h.trim() == name)),
            None => header
                .iter()
                .position(|h| h.trim() == *c)
                .map(Some)
                .ok_or_else(|| TableError::Malformed(format!("missing column `{c}`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TableError::Malformed(e.to_string()))?;
        rows.push(
            positions
                .iter()
                .map(|p| p.and_then(|p| record.get(p)).unwrap_or("").trim().to_string())
                .collect(),
        );
    }
    Ok(rows)
}

pub fn reader(data: &[u8]) -> Reader<&[u8]> {
    ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::None)
        .from_reader(data)
}

pub fn writer() -> Writer<Vec<u8>> {
    WriterBuilder::new()
        .quote_style(QuoteStyle::Necessary)
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

/// Writes rows of string cells under `header`. Writing into memory cannot fail.
pub fn write_rows<I, R, S>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = writer();
    w.write_record(header).expect("in-memory csv write");
    for row in rows {
        w.write_record(row).expect("in-memory csv write");
    }
    w.into_inner().expect("in-memory csv flush")
}

pub fn write_chants(chants: &[Chant]) -> Vec<u8> {
    write_rows(
        &ChantField::header(),
        chants.iter().map(|c| {
            ChantField::ALL
                .iter()
                .map(move |f| c.get(*f).unwrap_or(""))
        }),
    )
}

pub fn write_sources(sources: &[Source]) -> Vec<u8> {
    write_rows(
        &SourceField::header(),
        sources.iter().map(|s| {
            SourceField::ALL
                .iter()
                .map(move |f| s.get(*f).map(|v| v.into_owned()).unwrap_or_default())
        }),
    )
}
