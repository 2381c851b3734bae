//! Shared fixtures, generators and independent oracles for the integration
//! tests. Included by path from other crates' tests as well.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use cantus_core::ingest::{parse_chants_csv, parse_sources_csv};
use cantus_core::{Chant, ChantField, Corpus, FilterConfig, Source, SourceField};
use proptest::prelude::*;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("tests")
        .join("fixtures")
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_dir().join(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn fixture_records() -> (Vec<Chant>, Vec<Source>) {
    let (chants, issues) = parse_chants_csv(&fixture_bytes("chants.csv")).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
    let (sources, issues) = parse_sources_csv(&fixture_bytes("sources.csv")).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
    (chants, sources)
}

pub fn fixture_corpus() -> Corpus {
    let (chants, sources) = fixture_records();
    Corpus::new(chants, sources, true).unwrap()
}

// ---- note counting, straight from the character class table ----

const PITCHES: &str = "89abcdefghjklmnopqrs";
const LIQUESCENTS: &str = "ABCDEFGHJKLMNOPQRS";

pub fn oracle_note_count(melody: &str) -> usize {
    melody
        .chars()
        .filter(|c| PITCHES.contains(*c) || LIQUESCENTS.contains(*c))
        .count()
}

// ---- filter configs ----

const CHANT_VALUES: &[(ChantField, &[&str])] = &[
    (ChantField::Genre, &["A", "R", "V", "W", "H", "In", "I", "Missa"]),
    (ChantField::Db, &["CD", "MMMO", "SEMM", "PEM", "HYM", "FCB"]),
    (ChantField::Office, &["V", "M", "L", "E"]),
    (ChantField::Mode, &["1", "2", "7", "8", "3"]),
    (ChantField::Feast, &["Nativitas Domini", "Epiphania", "Pascha", "Pentecostes"]),
    (ChantField::CantusId, &["001000", "001005", "001010", "001020", "001030"]),
    (ChantField::Position, &["1", "2"]),
];

const SOURCE_VALUES: &[(SourceField, &[&str])] = &[
    (SourceField::Cursus, &["Secular", "Monastic"]),
    (SourceField::Provenance, &["Graz", "Klosterneuburg", "Einsiedeln", "Paris, Saint-Denis", "Utrecht"]),
    (SourceField::NumCentury, &["11", "12", "13", "14", "15", "16"]),
    (SourceField::Century, &["12th century", "c.1250", "13th century"]),
    (SourceField::Siglum, &["A-Gu 29", "CH-E 611", "I-BV 21", "NL-Uu 406"]),
];

fn value_map<F: Copy + Ord + std::fmt::Debug + 'static>(
    table: &'static [(F, &'static [&'static str])],
    allow_empty: bool,
) -> impl Strategy<Value = BTreeMap<F, BTreeSet<String>>> {
    let per_field = table
        .iter()
        .map(move |(field, values)| {
            let lo = if allow_empty { 0 } else { 1 };
            let values = proptest::sample::subsequence(values.to_vec(), lo..=values.len().min(3));
            (Just(*field), values, proptest::bool::weighted(0.25))
        })
        .collect::<Vec<_>>();
    per_field.prop_map(|entries| {
        entries
            .into_iter()
            .filter(|(_, _, on)| *on)
            .map(|(f, vals, _)| (f, vals.into_iter().map(String::from).collect()))
            .collect()
    })
}

pub fn arb_filter_config() -> impl Strategy<Value = FilterConfig> {
    let incipits = proptest::sample::subsequence(vec!["ave", "HODIE", "alleluia", "dominus", "o ", "x"], 1..=3);
    (
        value_map(CHANT_VALUES, true),
        value_map(CHANT_VALUES, false),
        value_map(SOURCE_VALUES, true),
        value_map(SOURCE_VALUES, false),
        proptest::option::weighted(0.3, any::<bool>()),
        proptest::option::weighted(0.3, 0u32..25),
        proptest::option::weighted(0.3, incipits),
        proptest::option::weighted(0.3, (10u32..17, 0u32..4)),
        proptest::bool::weighted(0.8),
        proptest::bool::weighted(0.8),
    )
        .prop_map(
            |(ci, ce, si, se, has_melody, min_notes, inc, range, dcs, dsc)| FilterConfig {
                chant_include: ci,
                chant_exclude: ce,
                source_include: si,
                source_exclude: se,
                has_melody,
                min_melody_notes: min_notes,
                incipit_contains: inc.map(|v| v.into_iter().map(|s| s.to_lowercase()).collect()),
                century_range: range.map(|(lo, w)| (lo, lo + w)),
                drop_chants_without_source: dcs,
                drop_sources_without_chants: dsc,
            },
        )
}

// ---- brute-force filter oracle ----

fn chant_value(c: &Chant, field: ChantField) -> Option<String> {
    let v = match field {
        ChantField::Chantlink => Some(c.chantlink.clone()),
        ChantField::Incipit => Some(c.incipit.clone()),
        ChantField::CantusId => Some(c.cantus_id.clone()),
        ChantField::Siglum => Some(c.siglum.clone()),
        ChantField::Folio => Some(c.folio.clone()),
        ChantField::Srclink => Some(c.srclink.clone()),
        ChantField::Db => Some(c.db.clone()),
        ChantField::Mode => c.mode.clone(),
        ChantField::Position => c.position.clone(),
        ChantField::Sequence => c.sequence.clone(),
        ChantField::Feast => c.feast.clone(),
        ChantField::FeastCode => c.feast_code.clone(),
        ChantField::Genre => c.genre.clone(),
        ChantField::Office => c.office.clone(),
        ChantField::MelodyId => c.melody_id.clone(),
        ChantField::FullText => c.full_text.clone(),
        ChantField::Melody => c.melody.clone(),
        ChantField::Image => c.image.clone(),
    };
    v.filter(|s| !s.trim().is_empty())
}

fn source_value(s: &Source, field: SourceField) -> Option<String> {
    let v = match field {
        SourceField::Title => s.title.clone(),
        SourceField::Siglum => Some(s.siglum.clone()),
        SourceField::Century => s.century.clone(),
        SourceField::Provenance => s.provenance.clone(),
        SourceField::Srclink => Some(s.srclink.clone()),
        SourceField::Cursus => s.cursus.as_ref().map(|c| c.as_str().to_string()),
        SourceField::NumCentury => s.num_century.map(|n| n.to_string()),
    };
    v.filter(|s| !s.trim().is_empty())
}

fn passes<F: Copy>(
    include: &BTreeMap<F, BTreeSet<String>>,
    exclude: &BTreeMap<F, BTreeSet<String>>,
    value: impl Fn(F) -> Option<String>,
) -> bool {
    for (f, allowed) in include {
        match value(*f) {
            Some(v) if allowed.contains(v.trim()) => {}
            _ => return false,
        }
    }
    for (f, banned) in exclude {
        if let Some(v) = value(*f) {
            if banned.contains(v.trim()) {
                return false;
            }
        }
    }
    true
}

/// (chantlinks, srclinks) kept by a naive per-record evaluation.
pub fn oracle_filter(chants: &[Chant], sources: &[Source], f: &FilterConfig) -> (Vec<String>, Vec<String>) {
    let mut kept_sources = Vec::new();
    for s in sources {
        if !passes(&f.source_include, &f.source_exclude, |fl| source_value(s, fl)) {
            continue;
        }
        if let Some((lo, hi)) = f.century_range {
            match s.num_century {
                Some(n) if lo <= n && n <= hi => {}
                _ => continue,
            }
        }
        kept_sources.push(s);
    }
    let mut kept_chants = Vec::new();
    for c in chants {
        if f.drop_chants_without_source && !kept_sources.iter().any(|s| s.srclink == c.srclink) {
            continue;
        }
        if !passes(&f.chant_include, &f.chant_exclude, |fl| chant_value(c, fl)) {
            continue;
        }
        let melody = c.melody.clone().unwrap_or_default();
        if let Some(want) = f.has_melody {
            if melody.trim().is_empty() == want {
                continue;
            }
        }
        if let Some(min) = f.min_melody_notes {
            if oracle_note_count(&melody) < min as usize {
                continue;
            }
        }
        if let Some(subs) = &f.incipit_contains {
            let inc = c.incipit.to_lowercase();
            if !subs.iter().any(|s| inc.contains(&s.to_lowercase())) {
                continue;
            }
        }
        kept_chants.push(c);
    }
    if f.drop_sources_without_chants {
        kept_sources.retain(|s| kept_chants.iter().any(|c| c.srclink == s.srclink));
    }
    (
        kept_chants.iter().map(|c| c.chantlink.clone()).collect(),
        kept_sources.iter().map(|s| s.srclink.clone()).collect(),
    )
}

pub fn record_ids(corpus: &Corpus) -> (Vec<String>, Vec<String>) {
    (
        corpus.chants().iter().map(|c| c.chantlink.clone()).collect(),
        corpus.sources().iter().map(|s| s.srclink.clone()).collect(),
    )
}

// ---- edit distance oracle: plain recursion with memo over prefixes ----

pub fn oracle_edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut memo = vec![vec![usize::MAX; b.len() + 1]; a.len() + 1];
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut Vec<Vec<usize>>) -> usize {
        if memo[i][j] != usize::MAX {
            return memo[i][j];
        }
        let d = if i == 0 {
            j
        } else if j == 0 {
            i
        } else {
            let sub = go(a, b, i - 1, j - 1, memo) + usize::from(a[i - 1] != b[j - 1]);
            let del = go(a, b, i - 1, j, memo) + 1;
            let ins = go(a, b, i, j - 1, memo) + 1;
            sub.min(del).min(ins)
        };
        memo[i][j] = d;
        d
    }
    go(&a, &b, a.len(), b.len(), &mut memo)
}

/// Score from first principles: sort whitespace tokens, then
/// 100 * (L - D) / L rounded half up, with exact rational arithmetic.
pub fn oracle_token_sort_score(a: &str, b: &str) -> u32 {
    let norm = |s: &str| {
        let lower: String = s
            .to_lowercase()
            .chars()
            .filter(|c| c.is_alphanumeric() || c.is_whitespace())
            .collect();
        let mut t: Vec<&str> = lower.split_whitespace().collect();
        t.sort();
        t.join(" ")
    };
    let (a, b) = (norm(a), norm(b));
    let l = a.chars().count().max(b.chars().count());
    if l == 0 {
        return 100;
    }
    let d = oracle_edit_distance(&a, &b);
    let num = 100 * (l - d);
    // round half up: floor(num / l + 1/2)
    ((2 * num + l) / (2 * l)) as u32
}

/// All strings of length 0..=max_len over `alphabet`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn distinct<T: std::hash::Hash + Eq + Clone>(items: &[T]) -> bool {
    items.iter().collect::<HashSet<_>>().len() == items.len()
}
