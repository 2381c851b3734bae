//! The corpus aggregate: records, lock and operations history.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

use crate::fields::{ChantField, Entity, SourceField};
use crate::model::{Chant, Source};
use crate::table;

/// Database codes found in the published snapshot.
pub const DEFAULT_DB_CODES: &[&str] = &[
    "CD", "MMMO", "CSK", "FCB", "CPL", "PEM", "SEMM", "HCD", "A4M", "HYM",
];

/// A record-level problem found while constructing a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub entity: Entity,
    pub id: String,
    pub field: String,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}: {}", self.entity, self.id, self.field, self.message)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("duplicate {kind} `{value}`")]
    DuplicateIdentifier { kind: &'static str, value: String },
    #[error("{} record(s) failed validation; first: {}", .0.len(), .0[0])]
    ValidationFailed(Vec<RecordError>),
    #[error("corpus is locked")]
    CorpusLocked,
    #[error("no {entity} with id `{id}`")]
    NoSuchRecord { entity: Entity, id: String },
    #[error("identifier column `{0}` cannot be edited in place")]
    IdentifierField(String),
}

/// Construction flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusOptions {
    /// Strict mode rejects dangling `srclink` references and unknown `db`
    /// codes; lenient mode keeps them as warnings.
    pub strict: bool,
    pub db_codes: BTreeSet<String>,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            strict: true,
            db_codes: DEFAULT_DB_CODES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl CorpusOptions {
    pub fn lenient() -> Self {
        CorpusOptions {
            strict: false,
            ..Default::default()
        }
    }

    pub fn with_db_code(mut self, code: impl Into<String>) -> Self {
        self.db_codes.insert(code.into());
        self
    }
}

/// One entry of the operations ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryEntry {
    pub op_name: String,
    /// Canonical serialization of the operation's parameters.
    pub params_digest: String,
    pub chants_before: usize,
    pub chants_after: usize,
    pub sources_before: usize,
    pub sources_after: usize,
    pub timestamp: DateTime<Utc>,
}

impl fmt::Display for HistoryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {} [{}]  chants: {} -> {}; sources: {} -> {}",
            self.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
            self.op_name,
            self.params_digest,
            self.chants_before,
            self.chants_after,
            self.sources_before,
            self.sources_after,
        )
    }
}

/// Chants, sources and the history of what was done to them.
///
/// Equality compares the records only; history and warnings are ignored.
#[derive(Debug, Clone)]
pub struct Corpus {
    chants: Vec<Chant>,
    sources: Vec<Source>,
    locked: bool,
    options: CorpusOptions,
    history: Vec<HistoryEntry>,
    warnings: Vec<RecordError>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.chants == other.chants && self.sources == other.sources
    }
}

impl Corpus {
    /// Strict construction with the default database manifest.
    pub fn new(chants: Vec<Chant>, sources: Vec<Source>, locked: bool) -> Result<Self, CorpusError> {
        Self::with_options(chants, sources, locked, CorpusOptions::default())
    }

    pub fn with_options(
        chants: Vec<Chant>,
        sources: Vec<Source>,
        locked: bool,
        options: CorpusOptions,
    ) -> Result<Self, CorpusError> {
        let warnings = validate(&chants, &sources, &options)?;
        let params = format!(
            "strict={} db_codes={}",
            options.strict,
            options.db_codes.iter().cloned().collect::<Vec<_>>().join(",")
        );
        let entry = HistoryEntry {
            op_name: "create".into(),
            params_digest: params,
            chants_before: 0,
            chants_after: chants.len(),
            sources_before: 0,
            sources_after: sources.len(),
            timestamp: Utc::now(),
        };
        Ok(Corpus {
            chants,
            sources,
            locked,
            options,
            history: vec![entry],
            warnings,
        })
    }

    pub fn chants(&self) -> &[Chant] {
        &self.chants
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Lenient-mode violations recorded at construction.
    pub fn warnings(&self) -> &[RecordError] {
        &self.warnings
    }

    pub fn options(&self) -> &CorpusOptions {
        &self.options
    }

    pub fn is_locked(&self) -> bool {
        self.locked
    }

    /// Locks the corpus. There is no way back.
    pub fn lock(mut self) -> Self {
        self.locked = true;
        self
    }

    pub fn chant(&self, chantlink: &str) -> Option<&Chant> {
        self.chants.iter().find(|c| c.chantlink == chantlink)
    }

    pub fn source(&self, srclink: &str) -> Option<&Source> {
        self.sources.iter().find(|s| s.srclink == srclink)
    }

    /// Edits one non-identifier column of a chant.
    pub fn set_chant_field(
        &mut self,
        chantlink: &str,
        field: ChantField,
        value: Option<String>,
    ) -> Result<(), CorpusError> {
        if self.locked {
            return Err(CorpusError::CorpusLocked);
        }
        if matches!(field, ChantField::Chantlink | ChantField::Srclink) {
            return Err(CorpusError::IdentifierField(field.to_string()));
        }
        if field.is_required() && value.as_deref().is_none_or(str::is_empty) {
            return Err(CorpusError::ValidationFailed(vec![RecordError {
                entity: Entity::Chant,
                id: chantlink.to_string(),
                field: field.to_string(),
                message: "required field cannot be cleared".into(),
            }]));
        }
        let chant = self
            .chants
            .iter_mut()
            .find(|c| c.chantlink == chantlink)
            .ok_or_else(|| CorpusError::NoSuchRecord {
                entity: Entity::Chant,
                id: chantlink.to_string(),
            })?;
        chant.set(field, value.clone());
        self.record(
            "set_chant_field",
            format!("{chantlink} {field}={}", value.unwrap_or_default()),
            self.chants.len(),
            self.sources.len(),
        );
        Ok(())
    }

    /// Edits one non-identifier column of a source.
    pub fn set_source_field(
        &mut self,
        srclink: &str,
        field: SourceField,
        value: Option<String>,
    ) -> Result<(), CorpusError> {
        if self.locked {
            return Err(CorpusError::CorpusLocked);
        }
        let bad = |message: &str| {
            CorpusError::ValidationFailed(vec![RecordError {
                entity: Entity::Source,
                id: srclink.to_string(),
                field: field.to_string(),
                message: message.to_string(),
            }])
        };
        let value = value.and_then(crate::model::opt);
        let source = self
            .sources
            .iter_mut()
            .find(|s| s.srclink == srclink)
            .ok_or_else(|| CorpusError::NoSuchRecord {
                entity: Entity::Source,
                id: srclink.to_string(),
            })?;
        match field {
            SourceField::Srclink => return Err(CorpusError::IdentifierField(field.to_string())),
            SourceField::Siglum => match &value {
                Some(v) => source.siglum = v.clone(),
                None => return Err(bad("required field cannot be cleared")),
            },
            SourceField::Title => source.title = value.clone(),
            SourceField::Century => source.century = value.clone(),
            SourceField::Provenance => source.provenance = value.clone(),
            SourceField::Cursus => {
                source.cursus = value.as_deref().map(|v| crate::model::Cursus::parse(v).0)
            }
            SourceField::NumCentury => {
                source.num_century = match &value {
                    None => None,
                    Some(v) => Some(v.parse().map_err(|_| bad("not an integer"))?),
                }
            }
        }
        self.record(
            "set_source_field",
            format!("{srclink} {field}={}", value.unwrap_or_default()),
            self.chants.len(),
            self.sources.len(),
        );
        Ok(())
    }

    /// A new corpus holding `chants` and `sources` that inherits this
    /// corpus's options, lock state and history, plus one entry for `op_name`.
    ///
    /// The lock does not block this: the receiver is never modified.
    pub fn derive(
        &self,
        op_name: &str,
        params_digest: impl Into<String>,
        chants: Vec<Chant>,
        sources: Vec<Source>,
    ) -> Result<Corpus, CorpusError> {
        self.derive_with_options(op_name, params_digest, chants, sources, self.options.clone())
    }

    /// Like [`Corpus::derive`] with different construction options.
    pub fn derive_with_options(
        &self,
        op_name: &str,
        params_digest: impl Into<String>,
        chants: Vec<Chant>,
        sources: Vec<Source>,
        options: CorpusOptions,
    ) -> Result<Corpus, CorpusError> {
        let warnings = validate(&chants, &sources, &options)?;
        let mut history = self.history.clone();
        history.push(HistoryEntry {
            op_name: op_name.to_string(),
            params_digest: params_digest.into(),
            chants_before: self.chants.len(),
            chants_after: chants.len(),
            sources_before: self.sources.len(),
            sources_after: sources.len(),
            timestamp: Utc::now(),
        });
        Ok(Corpus {
            chants,
            sources,
            locked: self.locked,
            options,
            history,
            warnings,
        })
    }

    fn record(&mut self, op_name: &str, params: String, chants_before: usize, sources_before: usize) {
        self.history.push(HistoryEntry {
            op_name: op_name.to_string(),
            params_digest: params,
            chants_before,
            chants_after: self.chants.len(),
            sources_before,
            sources_after: self.sources.len(),
            timestamp: Utc::now(),
        });
    }

    /// `(chants.csv, sources.csv)` in record order with the canonical column order.
    pub fn export_csv(&self) -> (Vec<u8>, Vec<u8>) {
        (
            table::write_chants(&self.chants),
            table::write_sources(&self.sources),
        )
    }

    /// The history ledger, one line per entry, oldest first.
    pub fn export_history(&self) -> String {
        let mut out = String::new();
        for entry in &self.history {
            out.push_str(&entry.to_string());
            out.push('\n');
        }
        out
    }
}

fn validate(
    chants: &[Chant],
    sources: &[Source],
    options: &CorpusOptions,
) -> Result<Vec<RecordError>, CorpusError> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    for c in chants {
        for f in c.missing_required() {
            errors.push(RecordError {
                entity: Entity::Chant,
                id: c.chantlink.clone(),
                field: f.to_string(),
                message: "required field is empty".into(),
            });
        }
    }
    for s in sources {
        for f in s.missing_required() {
            errors.push(RecordError {
                entity: Entity::Source,
                id: s.srclink.clone(),
                field: f.to_string(),
                message: "required field is empty".into(),
            });
        }
    }
    if !errors.is_empty() {
        return Err(CorpusError::ValidationFailed(errors));
    }

    let mut seen = HashSet::with_capacity(chants.len());
    for c in chants {
        if !seen.insert(c.chantlink.as_str()) {
            return Err(CorpusError::DuplicateIdentifier {
                kind: "chantlink",
                value: c.chantlink.clone(),
            });
        }
    }
    let mut srclinks = HashSet::with_capacity(sources.len());
    for s in sources {
        if !srclinks.insert(s.srclink.as_str()) {
            return Err(CorpusError::DuplicateIdentifier {
                kind: "srclink",
                value: s.srclink.clone(),
            });
        }
    }

    for c in chants {
        if !srclinks.contains(c.srclink.as_str()) {
            errors.push(RecordError {
                entity: Entity::Chant,
                id: c.chantlink.clone(),
                field: "srclink".into(),
                message: format!("source `{}` not in corpus", c.srclink),
            });
        }
        if !options.db_codes.contains(&c.db) {
            errors.push(RecordError {
                entity: Entity::Chant,
                id: c.chantlink.clone(),
                field: "db".into(),
                message: format!("unknown database code `{}`", c.db),
            });
        }
    }
    if options.strict && !errors.is_empty() {
        return Err(CorpusError::ValidationFailed(errors));
    }
    warnings.extend(errors);
    Ok(warnings)
}
