//! Chant and source records.

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fields::{ChantField, SourceField};
use crate::volpiano;

/// One catalogue record of a repertoire unit in one source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chant {
    pub chantlink: String,
    pub incipit: String,
    pub cantus_id: String,
    pub mode: Option<String>,
    pub siglum: String,
    pub position: Option<String>,
    pub folio: String,
    pub sequence: Option<String>,
    pub feast: Option<String>,
    pub feast_code: Option<String>,
    pub genre: Option<String>,
    pub office: Option<String>,
    pub srclink: String,
    pub melody_id: Option<String>,
    pub full_text: Option<String>,
    pub melody: Option<String>,
    pub db: String,
    pub image: Option<String>,
}

/// Empty strings collapse to `None` for optional columns.
pub(crate) fn opt(value: impl Into<String>) -> Option<String> {
    let value = value.into();
    if value.is_empty() {
        None
    } else {
        Some(value)
    }
}

fn required(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

impl Chant {
    pub fn get(&self, field: ChantField) -> Option<&str> {
        use ChantField::*;
        match field {
            Chantlink => required(&self.chantlink),
            Incipit => required(&self.incipit),
            CantusId => required(&self.cantus_id),
            Mode => self.mode.as_deref(),
            Siglum => required(&self.siglum),
            Position => self.position.as_deref(),
            Folio => required(&self.folio),
            Sequence => self.sequence.as_deref(),
            Feast => self.feast.as_deref(),
            FeastCode => self.feast_code.as_deref(),
            Genre => self.genre.as_deref(),
            Office => self.office.as_deref(),
            Srclink => required(&self.srclink),
            MelodyId => self.melody_id.as_deref(),
            FullText => self.full_text.as_deref(),
            Melody => self.melody.as_deref(),
            Db => required(&self.db),
            Image => self.image.as_deref(),
        }
    }

    /// Sets a column; `None` or an empty string clears it.
    pub fn set(&mut self, field: ChantField, value: Option<String>) {
        use ChantField::*;
        let value = value.and_then(opt);
        let slot = match field {
            Chantlink => {
                self.chantlink = value.unwrap_or_default();
                return;
            }
            Incipit => {
                self.incipit = value.unwrap_or_default();
                return;
            }
            CantusId => {
                self.cantus_id = value.unwrap_or_default();
                return;
            }
            Siglum => {
                self.siglum = value.unwrap_or_default();
                return;
            }
            Folio => {
                self.folio = value.unwrap_or_default();
                return;
            }
            Srclink => {
                self.srclink = value.unwrap_or_default();
                return;
            }
            Db => {
                self.db = value.unwrap_or_default();
                return;
            }
            Mode => &mut self.mode,
            Position => &mut self.position,
            Sequence => &mut self.sequence,
            Feast => &mut self.feast,
            FeastCode => &mut self.feast_code,
            Genre => &mut self.genre,
            Office => &mut self.office,
            MelodyId => &mut self.melody_id,
            FullText => &mut self.full_text,
            Melody => &mut self.melody,
            Image => &mut self.image,
        };
        *slot = value;
    }

    /// Required columns that are empty.
    pub fn missing_required(&self) -> Vec<ChantField> {
        ChantField::ALL
            .iter()
            .copied()
            .filter(|f| f.is_required() && self.get(*f).is_none())
            .collect()
    }

    pub fn melody(&self) -> Option<Melody> {
        self.melody.as_deref().map(Melody::new)
    }

    pub fn has_melody(&self) -> bool {
        self.melody.as_deref().is_some_and(|m| !m.is_empty())
    }
}

/// Liturgical ordering tradition of a source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cursus {
    Secular,
    Monastic,
    /// A value outside the two-term vocabulary, kept verbatim.
    Other(String),
}

impl Cursus {
    /// Exact match gives a known variant, a case-insensitive match gives the
    /// known variant with `normalized = true`, anything else is `Other`.
    pub fn parse(value: &str) -> (Cursus, bool) {
        match value {
            "Secular" => (Cursus::Secular, false),
            "Monastic" => (Cursus::Monastic, false),
            v if v.eq_ignore_ascii_case("secular") => (Cursus::Secular, true),
            v if v.eq_ignore_ascii_case("monastic") => (Cursus::Monastic, true),
            v => (Cursus::Other(v.to_string()), false),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Cursus::Secular => "Secular",
            Cursus::Monastic => "Monastic",
            Cursus::Other(v) => v,
        }
    }
}

impl fmt::Display for Cursus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One manuscript, print or fragment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub title: Option<String>,
    pub siglum: String,
    pub century: Option<String>,
    pub provenance: Option<String>,
    pub srclink: String,
    pub cursus: Option<Cursus>,
    pub num_century: Option<u32>,
}

impl Source {
    pub fn get(&self, field: SourceField) -> Option<Cow<'_, str>> {
        use SourceField::*;
        match field {
            Title => self.title.as_deref().map(Cow::Borrowed),
            Siglum => (!self.siglum.is_empty()).then_some(Cow::Borrowed(self.siglum.as_str())),
            Century => self.century.as_deref().map(Cow::Borrowed),
            Provenance => self.provenance.as_deref().map(Cow::Borrowed),
            Srclink => (!self.srclink.is_empty()).then_some(Cow::Borrowed(self.srclink.as_str())),
            Cursus => self.cursus.as_ref().map(|c| Cow::Borrowed(c.as_str())),
            NumCentury => self.num_century.map(|n| Cow::Owned(n.to_string())),
        }
    }

    pub fn missing_required(&self) -> Vec<SourceField> {
        SourceField::ALL
            .iter()
            .copied()
            .filter(|f| f.is_required() && self.get(*f).is_none())
            .collect()
    }

    /// Field-wise equality ignoring `srclink`.
    pub fn same_metadata(&self, other: &Source) -> bool {
        self.title == other.title
            && self.siglum == other.siglum
            && self.century == other.century
            && self.provenance == other.provenance
            && self.cursus == other.cursus
            && self.num_century == other.num_century
    }
}

/// A Volpiano melody with its derived views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Melody {
    raw: String,
}

impl Melody {
    pub fn new(raw: impl Into<String>) -> Self {
        Melody { raw: raw.into() }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn cleaned(&self) -> String {
        volpiano::clean_melody(&self.raw)
    }

    pub fn note_count(&self) -> usize {
        volpiano::count_notes(&self.raw)
    }
}
