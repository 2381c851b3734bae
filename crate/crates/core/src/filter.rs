//! Declarative corpus filters stored as small YAML files.
//!
//! A filter file has this shape (every key except `version` is optional):
//!
//! ```yaml
//! version: 1
//! chant_include:
//!   genre: [A, R]
//! chant_exclude:
//!   office: [M]
//! source_include:
//!   cursus: [Monastic]
//! source_exclude: {}
//! has_melody: true
//! min_melody_notes: 20
//! incipit_contains: [alleluia]
//! century_range: [12, 13]
//! drop_chants_without_source: true
//! drop_sources_without_chants: true
//! ```
//!
//! Field names in the include/exclude maps are the CSV column names. Values
//! listed for one field are alternatives; different fields must all match;
//! exclusion is applied after inclusion. An empty include list matches
//! nothing. Matching is exact after trimming, except `incipit_contains`,
//! which is a case-insensitive substring test that passes when any listed
//! substring occurs.
//!
//! `century_range` is inclusive and applies to `num_century`. Sources
//! without `num_century` never pass a century range.
//!
//! [`export_filter`] writes the canonical form: keys in the order above,
//! fields in column order, values sorted and deduplicated, defaults and
//! empty exclude lists omitted. `export(parse(export(f))) == export(f)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::str::FromStr;

use serde::Deserialize;
use serde_yaml::{Mapping, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, CorpusOptions};
use crate::fields::{ChantField, SourceField};
use crate::model::{Chant, Source};
use crate::volpiano;

pub const FILTER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterConfig {
    pub chant_include: BTreeMap<ChantField, BTreeSet<String>>,
    pub chant_exclude: BTreeMap<ChantField, BTreeSet<String>>,
    pub source_include: BTreeMap<SourceField, BTreeSet<String>>,
    pub source_exclude: BTreeMap<SourceField, BTreeSet<String>>,
    pub has_melody: Option<bool>,
    pub min_melody_notes: Option<u32>,
    /// Stored lowercased.
    pub incipit_contains: Option<BTreeSet<String>>,
    pub century_range: Option<(u32, u32)>,
    pub drop_chants_without_source: bool,
    pub drop_sources_without_chants: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            chant_include: BTreeMap::new(),
            chant_exclude: BTreeMap::new(),
            source_include: BTreeMap::new(),
            source_exclude: BTreeMap::new(),
            has_melody: None,
            min_melody_notes: None,
            incipit_contains: None,
            century_range: None,
            drop_chants_without_source: true,
            drop_sources_without_chants: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("century_range lower bound {0} is greater than upper bound {1}")]
    BadRange(u32, u32),
    #[error("syntax error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    SyntaxError { line: Option<usize>, message: String },
    #[error("unsupported filter version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Scalar {
    fn into_string(self) -> String {
        match self {
            Scalar::Str(s) => s,
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Bool(b) => b.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    #[serde(default)]
    chant_include: BTreeMap<String, Vec<Scalar>>,
    #[serde(default)]
    chant_exclude: BTreeMap<String, Vec<Scalar>>,
    #[serde(default)]
    source_include: BTreeMap<String, Vec<Scalar>>,
    #[serde(default)]
    source_exclude: BTreeMap<String, Vec<Scalar>>,
    has_melody: Option<bool>,
    min_melody_notes: Option<u32>,
    incipit_contains: Option<Vec<Scalar>>,
    century_range: Option<(u32, u32)>,
    drop_chants_without_source: Option<bool>,
    drop_sources_without_chants: Option<bool>,
}

fn value_set(values: Vec<Scalar>) -> BTreeSet<String> {
    values
        .into_iter()
        .map(|v| v.into_string().trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn field_map<F: FromStr + Ord>(
    raw: BTreeMap<String, Vec<Scalar>>,
    keep_empty: bool,
) -> Result<BTreeMap<F, BTreeSet<String>>, FilterError> {
    let mut out = BTreeMap::new();
    for (name, values) in raw {
        let field = name
            .trim()
            .parse::<F>()
            .map_err(|_| FilterError::UnknownField(name.clone()))?;
        let values = value_set(values);
        if keep_empty || !values.is_empty() {
            out.insert(field, values);
        }
    }
    Ok(out)
}

pub fn parse_filter(text: &str) -> Result<FilterConfig, FilterError> {
    let raw: RawConfig = serde_yaml::from_str(text).map_err(|e| FilterError::SyntaxError {
        line: e.location().map(|l| l.line()),
        message: e.to_string(),
    })?;
    if raw.version != FILTER_VERSION {
        return Err(FilterError::UnsupportedVersion(raw.version));
    }
    if let Some((lo, hi)) = raw.century_range {
        if lo > hi {
            return Err(FilterError::BadRange(lo, hi));
        }
    }
    Ok(FilterConfig {
        chant_include: field_map(raw.chant_include, true)?,
        chant_exclude: field_map(raw.chant_exclude, false)?,
        source_include: field_map(raw.source_include, true)?,
        source_exclude: field_map(raw.source_exclude, false)?,
        has_melody: raw.has_melody,
        min_melody_notes: raw.min_melody_notes,
        // substrings keep their spaces: "o " is not "o"
        incipit_contains: raw.incipit_contains.map(|v| {
            v.into_iter()
                .map(|s| s.into_string().to_lowercase())
                .filter(|s| !s.is_empty())
                .collect()
        }),
        century_range: raw.century_range,
        drop_chants_without_source: raw.drop_chants_without_source.unwrap_or(true),
        drop_sources_without_chants: raw.drop_sources_without_chants.unwrap_or(true),
    })
}

fn str_seq<'a>(values: impl IntoIterator<Item = &'a String>) -> Value {
    Value::Sequence(values.into_iter().map(|v| Value::String(v.clone())).collect())
}

fn field_mapping<F: ToString>(map: &BTreeMap<F, BTreeSet<String>>, skip_empty: bool) -> Option<Value> {
    let mut m = Mapping::new();
    for (field, values) in map {
        if skip_empty && values.is_empty() {
            continue;
        }
        m.insert(Value::String(field.to_string()), str_seq(values));
    }
    (!m.is_empty()).then_some(Value::Mapping(m))
}

/// Canonical text of `config`.
pub fn export_filter(config: &FilterConfig) -> String {
    let mut m = Mapping::new();
    let mut put = |k: &str, v: Value| {
        m.insert(Value::String(k.to_string()), v);
    };
    put("version", Value::Number(FILTER_VERSION.into()));
    if let Some(v) = field_mapping(&config.chant_include, false) {
        put("chant_include", v);
    }
    if let Some(v) = field_mapping(&config.chant_exclude, true) {
        put("chant_exclude", v);
    }
    if let Some(v) = field_mapping(&config.source_include, false) {
        put("source_include", v);
    }
    if let Some(v) = field_mapping(&config.source_exclude, true) {
        put("source_exclude", v);
    }
    if let Some(b) = config.has_melody {
        put("has_melody", Value::Bool(b));
    }
    if let Some(n) = config.min_melody_notes {
        put("min_melody_notes", Value::Number(n.into()));
    }
    if let Some(subs) = &config.incipit_contains {
        put("incipit_contains", str_seq(subs));
    }
    if let Some((lo, hi)) = config.century_range {
        put(
            "century_range",
            Value::Sequence(vec![Value::Number(lo.into()), Value::Number(hi.into())]),
        );
    }
    if !config.drop_chants_without_source {
        put("drop_chants_without_source", Value::Bool(false));
    }
    if !config.drop_sources_without_chants {
        put("drop_sources_without_chants", Value::Bool(false));
    }
    serde_yaml::to_string(&Value::Mapping(m)).expect("yaml mapping serializes")
}

/// `sha256:<hex>` of the canonical export.
pub fn config_digest(config: &FilterConfig) -> String {
    let hash = Sha256::digest(export_filter(config).as_bytes());
    format!("sha256:{}", hex::encode(hash))
}

/// Indices of the records kept by a filter, in corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub chants: Vec<usize>,
    pub sources: Vec<usize>,
}

fn matches_include<'a, F: Copy>(
    include: &BTreeMap<F, BTreeSet<String>>,
    get: impl Fn(F) -> Option<std::borrow::Cow<'a, str>>,
) -> bool {
    include.iter().all(|(field, values)| {
        get(*field).is_some_and(|v| values.contains(v.trim()))
    })
}

fn matches_exclude<'a, F: Copy>(
    exclude: &BTreeMap<F, BTreeSet<String>>,
    get: impl Fn(F) -> Option<std::borrow::Cow<'a, str>>,
) -> bool {
    exclude.iter().any(|(field, values)| {
        get(*field).is_some_and(|v| values.contains(v.trim()))
    })
}

impl FilterConfig {
    pub fn source_passes(&self, s: &Source) -> bool {
        if !matches_include(&self.source_include, |f| s.get(f)) {
            return false;
        }
        if matches_exclude(&self.source_exclude, |f| s.get(f)) {
            return false;
        }
        match (self.century_range, s.num_century) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((lo, hi)), Some(n)) => (lo..=hi).contains(&n),
        }
    }

    pub fn chant_passes(&self, c: &Chant) -> bool {
        let get = |f| c.get(f).map(std::borrow::Cow::Borrowed);
        if !matches_include(&self.chant_include, get) {
            return false;
        }
        if matches_exclude(&self.chant_exclude, get) {
            return false;
        }
        if let Some(want) = self.has_melody {
            if c.has_melody() != want {
                return false;
            }
        }
        if let Some(min) = self.min_melody_notes {
            let notes = c.melody.as_deref().map(volpiano::count_notes).unwrap_or(0);
            if notes < min as usize {
                return false;
            }
        }
        if let Some(subs) = &self.incipit_contains {
            let incipit = c.incipit.to_lowercase();
            if !subs.iter().any(|s| incipit.contains(s.as_str())) {
                return false;
            }
        }
        true
    }

    /// Runs the four filtering stages: sources, dangling chants, chants,
    /// empty sources.
    pub fn select(&self, chants: &[Chant], sources: &[Source]) -> Selection {
        let mut kept_sources: Vec<usize> = (0..sources.len())
            .filter(|&i| self.source_passes(&sources[i]))
            .collect();
        let live: HashSet<&str> = kept_sources
            .iter()
            .map(|&i| sources[i].srclink.as_str())
            .collect();
        let kept_chants: Vec<usize> = (0..chants.len())
            .filter(|&i| {
                let c = &chants[i];
                (!self.drop_chants_without_source || live.contains(c.srclink.as_str()))
                    && self.chant_passes(c)
            })
            .collect();
        if self.drop_sources_without_chants {
            let used: HashSet<&str> = kept_chants
                .iter()
                .map(|&i| chants[i].srclink.as_str())
                .collect();
            kept_sources.retain(|&i| used.contains(sources[i].srclink.as_str()));
        }
        Selection {
            chants: kept_chants,
            sources: kept_sources,
        }
    }
}

/// Filters `corpus` into a new corpus; the input is untouched, so this
/// works on locked corpora too. The result inherits lock state and history
/// and gains a `filter` entry carrying the config digest.
pub fn apply_filter(corpus: &Corpus, config: &FilterConfig) -> Result<Corpus, CorpusError> {
    let sel = config.select(corpus.chants(), corpus.sources());
    let chants = sel.chants.iter().map(|&i| corpus.chants()[i].clone()).collect();
    let sources = sel.sources.iter().map(|&i| corpus.sources()[i].clone()).collect();
    let options = CorpusOptions {
        strict: corpus.options().strict && config.drop_chants_without_source,
        ..corpus.options().clone()
    };
    corpus.derive_with_options("filter", config_digest(config), chants, sources, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_permissive() {
        let f = parse_filter("version: 1").unwrap();
        assert_eq!(f, FilterConfig::default());
        assert_eq!(export_filter(&f), "version: 1\n");
    }

    #[test]
    fn unknown_field() {
        let err = parse_filter("version: 1\nchant_include:\n  colour: [red]\n").unwrap_err();
        assert_eq!(err, FilterError::UnknownField("colour".into()));
        let err = parse_filter("version: 1\nsource_exclude:\n  genre: [A]\n").unwrap_err();
        assert_eq!(err, FilterError::UnknownField("genre".into()));
    }

    #[test]
    fn bad_range() {
        let err = parse_filter("version: 1\ncentury_range: [14, 12]\n").unwrap_err();
        assert_eq!(err, FilterError::BadRange(14, 12));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse_filter("version: 1\nchant_include: [\n").unwrap_err();
        assert!(matches!(err, FilterError::SyntaxError { line: Some(_), .. }), "{err:?}");
        let err = parse_filter("version: 1\nfavourite: 3\n").unwrap_err();
        assert!(matches!(err, FilterError::SyntaxError { .. }));
        assert!(matches!(parse_filter("").unwrap_err(), FilterError::SyntaxError { .. }));
        assert_eq!(parse_filter("version: 2").unwrap_err(), FilterError::UnsupportedVersion(2));
    }

    #[test]
    fn export_is_canonical() {
        let a = parse_filter("version: 1\nchant_include:\n  genre: [R, A]\n  cantus_id: ['007129a']\n").unwrap();
        let b = parse_filter("chant_include:\n  cantus_id: ['007129a']\n  genre: [A, R, A]\nversion: 1\n").unwrap();
        assert_eq!(export_filter(&a), export_filter(&b));
        let text = export_filter(&a);
        assert!(text.find("cantus_id").unwrap() < text.find("genre").unwrap());
        assert!(text.find("- A").unwrap() < text.find("- R").unwrap());
        assert_eq!(parse_filter(&text).unwrap(), a);
    }

    #[test]
    fn numeric_values_become_strings() {
        let f = parse_filter("version: 1\nsource_include:\n  num_century: [12, 13]\n").unwrap();
        let set = &f.source_include[&SourceField::NumCentury];
        assert!(set.contains("12") && set.contains("13"));
        let again = parse_filter(&export_filter(&f)).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn full_round_trip() {
        let text = "version: 1\nchant_include:\n  genre: []\nchant_exclude:\n  office: []\nhas_melody: true\nmin_melody_notes: 20\nincipit_contains: [Alleluia]\ncentury_range: [12, 13]\ndrop_chants_without_source: false\ndrop_sources_without_chants: false\n";
        let f = parse_filter(text).unwrap();
        assert!(f.chant_include[&ChantField::Genre].is_empty());
        assert!(f.chant_exclude.is_empty());
        assert_eq!(f.incipit_contains, Some(BTreeSet::from(["alleluia".to_string()])));
        let out = export_filter(&f);
        assert_eq!(parse_filter(&out).unwrap(), f);
        assert_eq!(export_filter(&parse_filter(&out).unwrap()), out);
    }

    #[test]
    fn digest_is_stable() {
        let f = parse_filter("version: 1\nhas_melody: true").unwrap();
        assert_eq!(config_digest(&f), config_digest(&f.clone()));
        assert!(config_digest(&f).starts_with("sha256:"));
        assert_ne!(config_digest(&f), config_digest(&FilterConfig::default()));
    }
}
