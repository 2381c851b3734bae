//! Corpus counts: the chant/source summary and the per-database breakdown.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::model::Chant;
use crate::table;
use crate::volpiano;

/// A source counts as large when its chant count is strictly above this.
pub const MANY_CHANTS_THRESHOLD: usize = 100;
/// `true`: "more than" the threshold; `false`: "at least".
pub const MANY_CHANTS_STRICT: bool = true;
/// Minimum note count for the long-melody tally.
pub const LONG_MELODY_NOTES: usize = 20;

fn is_large(chant_count: usize) -> bool {
    if MANY_CHANTS_STRICT {
        chant_count > MANY_CHANTS_THRESHOLD
    } else {
        chant_count >= MANY_CHANTS_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub total_chants: usize,
    pub chants_with_melody: usize,
    pub chants_with_melody_20plus: usize,
    pub total_sources: usize,
    pub sources_100plus_chants: usize,
    pub sources_with_provenance: usize,
    pub sources_with_century: usize,
    pub sources_with_cursus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerDbRow {
    pub db: String,
    pub n_chants: usize,
    pub n_cantus_ids: usize,
    pub n_unique_cantus_ids: usize,
    pub n_sources: usize,
    pub n_sources_100plus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerDbStats {
    pub rows: Vec<PerDbRow>,
    /// Sources whose chants come from more than one database, with those
    /// databases. Such a source is counted once in each.
    pub conflicts: Vec<(String, Vec<String>)>,
}

fn melody_notes(c: &Chant) -> Option<usize> {
    c.has_melody()
        .then(|| volpiano::count_notes(c.melody.as_deref().unwrap_or("")))
}

pub fn corpus_stats(corpus: &Corpus) -> StatsReport {
    let chants = corpus.chants();
    let sources = corpus.sources();

    let mut with_melody = 0;
    let mut long = 0;
    let mut per_source: HashMap<&str, usize> = HashMap::new();
    for c in chants {
        if let Some(notes) = melody_notes(c) {
            with_melody += 1;
            if notes >= LONG_MELODY_NOTES {
                long += 1;
            }
        }
        *per_source.entry(c.srclink.as_str()).or_default() += 1;
    }

    StatsReport {
        total_chants: chants.len(),
        chants_with_melody: with_melody,
        chants_with_melody_20plus: long,
        total_sources: sources.len(),
        sources_100plus_chants: sources
            .iter()
            .filter(|s| is_large(per_source.get(s.srclink.as_str()).copied().unwrap_or(0)))
            .count(),
        sources_with_provenance: sources.iter().filter(|s| s.provenance.is_some()).count(),
        sources_with_century: sources.iter().filter(|s| s.century.is_some()).count(),
        sources_with_cursus: sources.iter().filter(|s| s.cursus.is_some()).count(),
    }
}

pub fn per_db_stats(corpus: &Corpus) -> PerDbStats {
    #[derive(Default)]
    struct Acc<'a> {
        chants: usize,
        cids: HashSet<&'a str>,
        per_source: HashMap<&'a str, usize>,
    }

    let mut by_db: BTreeMap<&str, Acc> = BTreeMap::new();
    let mut cid_dbs: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    let mut source_dbs: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in corpus.chants() {
        let acc = by_db.entry(c.db.as_str()).or_default();
        acc.chants += 1;
        acc.cids.insert(c.cantus_id.as_str());
        *acc.per_source.entry(c.srclink.as_str()).or_default() += 1;
        cid_dbs.entry(c.cantus_id.as_str()).or_default().insert(c.db.as_str());
        source_dbs.entry(c.srclink.as_str()).or_default().insert(c.db.as_str());
    }

    let mut rows: Vec<PerDbRow> = by_db
        .into_iter()
        .map(|(db, acc)| PerDbRow {
            db: db.to_string(),
            n_chants: acc.chants,
            n_cantus_ids: acc.cids.len(),
            n_unique_cantus_ids: acc.cids.iter().filter(|cid| cid_dbs[*cid].len() == 1).count(),
            n_sources: acc.per_source.len(),
            n_sources_100plus: acc.per_source.values().filter(|n| is_large(**n)).count(),
        })
        .collect();
    rows.sort_by(|a, b| b.n_chants.cmp(&a.n_chants).then_with(|| a.db.cmp(&b.db)));

    let conflicts = source_dbs
        .into_iter()
        .filter(|(_, dbs)| dbs.len() > 1)
        .map(|(src, dbs)| (src.to_string(), dbs.into_iter().map(String::from).collect()))
        .collect();
    PerDbStats { rows, conflicts }
}

impl StatsReport {
    fn lines(&self) -> [(&'static str, usize); 8] {
        [
            ("total_chants", self.total_chants),
            ("chants_with_melody", self.chants_with_melody),
            ("chants_with_melody_20plus", self.chants_with_melody_20plus),
            ("total_sources", self.total_sources),
            ("sources_100plus_chants", self.sources_100plus_chants),
            ("sources_with_provenance", self.sources_with_provenance),
            ("sources_with_century", self.sources_with_century),
            ("sources_with_cursus", self.sources_with_cursus),
        ]
    }

    /// `key: value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        self.lines()
            .iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        table::write_rows(
            &["statistic", "value"],
            self.lines().iter().map(|(k, v)| [k.to_string(), v.to_string()]),
        )
    }
}

impl PerDbStats {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>9} {:>7} {:>12} {:>9} {:>14}",
            "db", "chants", "CIDs", "unique CIDs", "sources", "sources(100+)"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<8} {:>9} {:>7} {:>12} {:>9} {:>14}",
                r.db, r.n_chants, r.n_cantus_ids, r.n_unique_cantus_ids, r.n_sources, r.n_sources_100plus
            );
        }
        for (src, dbs) in &self.conflicts {
            let _ = writeln!(out, "note: source {src} is referenced from {}", dbs.join(", "));
        }
        out
    }

    pub fn to_csv(&self) -> Vec<u8> {
        table::write_rows(
            &["db", "n_chants", "n_cantus_ids", "n_unique_cantus_ids", "n_sources", "n_sources_100plus"],
            self.rows.iter().map(|r| {
                [
                    r.db.clone(),
                    r.n_chants.to_string(),
                    r.n_cantus_ids.to_string(),
                    r.n_unique_cantus_ids.to_string(),
                    r.n_sources.to_string(),
                    r.n_sources_100plus.to_string(),
                ]
            }),
        )
    }
}
