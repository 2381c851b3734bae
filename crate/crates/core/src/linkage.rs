//! Assigning Cantus IDs to chants from outside the Cantus network and
//! exporting them in the chants/sources schema.
//!
//! Texts are compared with a token-sort similarity: both strings are
//! lowercased, optionally folded through a substitution table, stripped of
//! punctuation, split on whitespace, sorted and rejoined with single spaces.
//! The score is `round(100 * (1 - d / n))` where `d` is the unit-cost edit
//! distance between the two normalized strings and `n` the length of the
//! longer one (in characters). Two empty strings score 100.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::model::{opt, Source};
use crate::table::{self, read_columns, TableError};

pub const DEFAULT_THRESHOLD: u32 = 60;
/// Number of candidates listed per record in the audit file.
pub const AUDIT_TOP_N: usize = 5;

/// Orthographic folds for Latin chant texts: h-dropping, i/j and u/v.
pub const LATIN_FOLDS: &[(&str, &str)] = &[("h", ""), ("j", "i"), ("v", "u")];

/// Lowercasing plus an ordered list of substring substitutions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Normalizer {
    pub substitutions: Vec<(String, String)>,
}

impl Normalizer {
    pub fn latin_folds() -> Self {
        Normalizer {
            substitutions: LATIN_FOLDS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    /// Reads `from,to` rows.
    pub fn from_csv(data: &[u8]) -> Result<Self, TableError> {
        let substitutions = read_columns(data, &["from", "to"])?
            .into_iter()
            .map(|r| (r[0].to_lowercase(), r[1].to_lowercase()))
            .collect();
        Ok(Normalizer { substitutions })
    }

    pub fn normalize(&self, text: &str) -> String {
        let mut s = text.to_lowercase();
        for (from, to) in &self.substitutions {
            if !from.is_empty() {
                s = s.replace(from.as_str(), to);
            }
        }
        let stripped: String = s
            .chars()
            .filter(|c| c.is_alphanumeric() || c.is_whitespace())
            .collect();
        let mut tokens: Vec<&str> = stripped.split_whitespace().collect();
        tokens.sort_unstable();
        tokens.join(" ")
    }

    pub fn similarity(&self, a: &str, b: &str) -> u32 {
        normalized_similarity(&self.normalize(a), &self.normalize(b))
    }
}

/// Unit-cost Levenshtein distance over characters.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Score of two already-normalized strings.
pub fn normalized_similarity(a: &str, b: &str) -> u32 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 100;
    }
    let same = (longest - edit_distance(a, b)) as u64;
    let n = longest as u64;
    // round half up of 100 * same / n
    ((200 * same + n) / (2 * n)) as u32
}

/// Token-sort similarity in `0..=100` without substitutions.
pub fn token_sort_similarity(a: &str, b: &str) -> u32 {
    Normalizer::default().similarity(a, b)
}

/// One chant from the dataset being linked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExternalRecord {
    pub record_id: String,
    /// Incipit or full text, whichever the dataset provides.
    pub text_content: String,
    pub genre: String,
    pub feast: Option<String>,
    pub melody: Option<String>,
    pub external_siglum: String,
    pub folio: Option<String>,
}

/// A Cantus Index entry to match against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Candidate {
    pub cantus_id: String,
    pub text: String,
    pub genre: String,
    pub feast: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchOutcome {
    Matched { cantus_id: String, score: u32 },
    /// Tied candidates (cantus_id, score) that the feast could not separate.
    Ambiguous(Vec<(String, u32)>),
    NoMatch { best_score: u32 },
}

impl MatchOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            MatchOutcome::Matched { .. } => "matched",
            MatchOutcome::Ambiguous(_) => "ambiguous",
            MatchOutcome::NoMatch { .. } => "no_match",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchDecision {
    pub record_id: String,
    pub outcome: MatchOutcome,
    pub disambiguated_by_feast: bool,
    /// Best candidates by text score, at most [`AUDIT_TOP_N`].
    pub top_candidates: Vec<(String, u32)>,
}

impl MatchDecision {
    pub fn best_score(&self) -> u32 {
        self.top_candidates.first().map(|c| c.1).unwrap_or(0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkageError {
    #[error("no candidates to match record `{0}` against")]
    EmptyCandidateSet(String),
    #[error("record id `{0}` occurs more than once")]
    DuplicateRecordId(String),
    #[error("no match decision for record `{0}`")]
    MissingDecision(String),
    #[error("siglum `{0}` has no concordance entry")]
    MissingConcordanceEntry(String),
    #[error("sigla {1:?} all map to `{0}`")]
    NonInjectiveConcordance(String, Vec<String>),
    #[error("no source metadata for siglum `{0}`")]
    MissingSourceMetadata(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone)]
pub struct Matcher {
    pub threshold: u32,
    pub normalizer: Normalizer,
}

impl Default for Matcher {
    fn default() -> Self {
        Matcher {
            threshold: DEFAULT_THRESHOLD,
            normalizer: Normalizer::default(),
        }
    }
}

impl Matcher {
    pub fn with_threshold(threshold: u32) -> Self {
        Matcher {
            threshold,
            ..Default::default()
        }
    }

    /// Matches one record against candidates already restricted to its genre.
    ///
    /// The single best-scoring Cantus ID wins if it reaches the threshold.
    /// Exact ties at the top are broken by feast similarity; a tie that
    /// survives that, or a record without a feast, is `Ambiguous`.
    pub fn match_record(
        &self,
        record: &ExternalRecord,
        candidates: &[&Candidate],
    ) -> Result<MatchDecision, LinkageError> {
        if candidates.is_empty() {
            return Err(LinkageError::EmptyCandidateSet(record.record_id.clone()));
        }
        let text = self.normalizer.normalize(&record.text_content);
        let mut scored: Vec<(usize, u32)> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, normalized_similarity(&text, &self.normalizer.normalize(&c.text))))
            .collect();
        scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let top_candidates = scored
            .iter()
            .take(AUDIT_TOP_N)
            .map(|(i, s)| (candidates[*i].cantus_id.clone(), *s))
            .collect();
        let best = scored[0].1;

        let decision = |outcome, disambiguated_by_feast| MatchDecision {
            record_id: record.record_id.clone(),
            outcome,
            disambiguated_by_feast,
            top_candidates,
        };

        if best < self.threshold {
            return Ok(decision(MatchOutcome::NoMatch { best_score: best }, false));
        }

        // tied candidates, one per Cantus ID, in candidate order
        let mut seen = HashSet::new();
        let tied: Vec<&Candidate> = scored
            .iter()
            .take_while(|(_, s)| *s == best)
            .map(|(i, _)| candidates[*i])
            .filter(|c| seen.insert(c.cantus_id.as_str()))
            .collect();

        if tied.len() == 1 {
            let cantus_id = tied[0].cantus_id.clone();
            return Ok(decision(MatchOutcome::Matched { cantus_id, score: best }, false));
        }

        let ambiguous = |tied: &[&Candidate]| {
            MatchOutcome::Ambiguous(tied.iter().map(|c| (c.cantus_id.clone(), best)).collect())
        };
        let Some(feast) = record.feast.as_deref() else {
            return Ok(decision(ambiguous(&tied), false));
        };
        let feast_scores: Vec<u32> = tied
            .iter()
            .map(|c| c.feast.as_deref().map(|f| self.normalizer.similarity(feast, f)).unwrap_or(0))
            .collect();
        let top = *feast_scores.iter().max().unwrap();
        let winners: Vec<usize> = (0..tied.len()).filter(|&i| feast_scores[i] == top).collect();
        if winners.len() == 1 {
            let cantus_id = tied[winners[0]].cantus_id.clone();
            Ok(decision(MatchOutcome::Matched { cantus_id, score: best }, true))
        } else {
            let still: Vec<&Candidate> = winners.iter().map(|&i| tied[i]).collect();
            Ok(decision(ambiguous(&still), false))
        }
    }

    /// Matches every record against the candidates of its genre. A record
    /// whose genre has no candidates gets `NoMatch` with score 0.
    pub fn match_batch(
        &self,
        records: &[ExternalRecord],
        candidates: &[Candidate],
    ) -> Result<Vec<MatchDecision>, LinkageError> {
        check_unique_ids(records)?;
        let mut by_genre: HashMap<&str, Vec<&Candidate>> = HashMap::new();
        for c in candidates {
            by_genre.entry(c.genre.as_str()).or_default().push(c);
        }
        records
            .iter()
            .map(|r| match by_genre.get(r.genre.as_str()) {
                Some(cands) => self.match_record(r, cands),
                None => Ok(MatchDecision {
                    record_id: r.record_id.clone(),
                    outcome: MatchOutcome::NoMatch { best_score: 0 },
                    disambiguated_by_feast: false,
                    top_candidates: Vec::new(),
                }),
            })
            .collect()
    }
}

/// Matches with the default normalizer.
pub fn match_cantus_id(
    record: &ExternalRecord,
    candidates: &[Candidate],
    threshold: u32,
) -> Result<MatchDecision, LinkageError> {
    let refs: Vec<&Candidate> = candidates.iter().collect();
    Matcher::with_threshold(threshold).match_record(record, &refs)
}

fn check_unique_ids(records: &[ExternalRecord]) -> Result<(), LinkageError> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.record_id.as_str()) {
            return Err(LinkageError::DuplicateRecordId(r.record_id.clone()));
        }
    }
    Ok(())
}

/// External siglum to standard (RISM) siglum.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiglumConcordance(pub BTreeMap<String, String>);

impl SiglumConcordance {
    /// Reads `external_siglum,siglum` rows.
    pub fn from_csv(data: &[u8]) -> Result<Self, TableError> {
        Ok(SiglumConcordance(
            read_columns(data, &["external_siglum", "siglum"])?
                .into_iter()
                .map(|r| (r[0].clone(), r[1].clone()))
                .collect(),
        ))
    }

    pub fn get(&self, external: &str) -> Option<&str> {
        self.0.get(external).map(String::as_str)
    }
}

/// Reads `record_id,text_content,genre,external_siglum` plus optional
/// `feast,melody,folio` columns.
pub fn records_from_csv(data: &[u8]) -> Result<Vec<ExternalRecord>, TableError> {
    Ok(read_columns(
        data,
        &["record_id", "text_content", "genre", "feast?", "melody?", "external_siglum", "folio?"],
    )?
    .into_iter()
    .map(|r| ExternalRecord {
        record_id: r[0].clone(),
        text_content: r[1].clone(),
        genre: r[2].clone(),
        feast: opt(r[3].clone()),
        melody: opt(r[4].clone()),
        external_siglum: r[5].clone(),
        folio: opt(r[6].clone()),
    })
    .collect())
}

/// Reads `cantus_id,text,genre` plus an optional `feast` column.
pub fn candidates_from_csv(data: &[u8]) -> Result<Vec<Candidate>, TableError> {
    Ok(read_columns(data, &["cantus_id", "text", "genre", "feast?"])?
        .into_iter()
        .map(|r| Candidate {
            cantus_id: r[0].clone(),
            text: r[1].clone(),
            genre: r[2].clone(),
            feast: opt(r[3].clone()),
        })
        .collect())
}

/// Which text the matcher saw, recorded in the audit file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MatchedOn {
    #[default]
    Incipit,
    FullText,
}

impl fmt::Display for MatchedOn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchedOn::Incipit => "incipit",
            MatchedOn::FullText => "full_text",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExportOptions {
    /// Prefix of synthesized chantlinks; the record id is appended.
    pub chantlink_base: String,
    pub db_code: String,
    /// Folio written for records that have none; folio is a required column.
    pub missing_folio: String,
    pub matched_on: MatchedOn,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            chantlink_base: "https://corpus-monodicum.de/records/".into(),
            db_code: "CM".into(),
            missing_folio: "?".into(),
            matched_on: MatchedOn::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaExport {
    pub chants_csv: Vec<u8>,
    pub sources_csv: Vec<u8>,
    pub audit_csv: Vec<u8>,
    pub matched: usize,
    pub sources: usize,
}

fn url_segment(id: &str) -> String {
    let mut out = String::with_capacity(id.len());
    for b in id.bytes() {
        if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// Writes matched records as chant rows, the sources they reference and an
/// audit row for every record.
pub fn export_to_schema(
    records: &[ExternalRecord],
    decisions: &[MatchDecision],
    concordance: &SiglumConcordance,
    source_metadata: &[Source],
    options: &ExportOptions,
) -> Result<SchemaExport, LinkageError> {
    check_unique_ids(records)?;
    let by_id: HashMap<&str, &MatchDecision> =
        decisions.iter().map(|d| (d.record_id.as_str(), d)).collect();

    let mut reverse: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in records {
        let standard = concordance
            .get(&r.external_siglum)
            .ok_or_else(|| LinkageError::MissingConcordanceEntry(r.external_siglum.clone()))?;
        let externals = reverse.entry(standard).or_default();
        if !externals.contains(&r.external_siglum.as_str()) {
            externals.push(&r.external_siglum);
        }
    }
    if let Some((standard, externals)) = reverse.iter().find(|(_, e)| e.len() > 1) {
        return Err(LinkageError::NonInjectiveConcordance(
            standard.to_string(),
            externals.iter().map(|s| s.to_string()).collect(),
        ));
    }

    let sources_by_siglum: HashMap<&str, &Source> =
        source_metadata.iter().map(|s| (s.siglum.as_str(), s)).collect();

    let mut chant_rows: Vec<crate::model::Chant> = Vec::new();
    let mut used_sources: Vec<Source> = Vec::new();
    let mut used_links: HashSet<&str> = HashSet::new();
    let mut audit: Vec<[String; 7]> = Vec::with_capacity(records.len());

    for r in records {
        let d = by_id
            .get(r.record_id.as_str())
            .ok_or_else(|| LinkageError::MissingDecision(r.record_id.clone()))?;
        let candidates = d
            .top_candidates
            .iter()
            .map(|(cid, s)| format!("{cid}:{s}"))
            .collect::<Vec<_>>()
            .join("|");
        let cantus_id = match &d.outcome {
            MatchOutcome::Matched { cantus_id, .. } => cantus_id.clone(),
            _ => String::new(),
        };
        audit.push([
            r.record_id.clone(),
            d.outcome.label().to_string(),
            cantus_id.clone(),
            d.best_score().to_string(),
            d.disambiguated_by_feast.to_string(),
            options.matched_on.to_string(),
            candidates,
        ]);

        if cantus_id.is_empty() {
            continue;
        }
        let siglum = concordance.get(&r.external_siglum).unwrap_or_default();
        let source = sources_by_siglum
            .get(siglum)
            .ok_or_else(|| LinkageError::MissingSourceMetadata(siglum.to_string()))?;
        if used_links.insert(source.srclink.as_str()) {
            used_sources.push((*source).clone());
        }
        chant_rows.push(crate::model::Chant {
            chantlink: format!("{}{}", options.chantlink_base, url_segment(&r.record_id)),
            incipit: r.text_content.clone(),
            cantus_id,
            siglum: siglum.to_string(),
            folio: r.folio.clone().unwrap_or_else(|| options.missing_folio.clone()),
            feast: r.feast.clone(),
            genre: opt(r.genre.clone()),
            srclink: source.srclink.clone(),
            melody: r.melody.clone(),
            db: options.db_code.clone(),
            ..Default::default()
        });
    }

    Ok(SchemaExport {
        matched: chant_rows.len(),
        sources: used_sources.len(),
        chants_csv: table::write_chants(&chant_rows),
        sources_csv: table::write_sources(&used_sources),
        audit_csv: table::write_rows(
            &[
                "record_id",
                "outcome",
                "cantus_id",
                "best_score",
                "disambiguated_by_feast",
                "matched_on",
                "candidates",
            ],
            audit,
        ),
    })
}
