//! Snapshot cleaning passes.
//!
//! Each pass is a pure function over record slices that returns the new
//! records plus a [`CleaningReport`]. Passes are idempotent and never invent
//! records. [`run_pipeline`] applies them in the fixed order:
//!
//! 1. [`normalize_url_scheme`]
//! 2. [`dedup_sources_by_siglum`]
//! 3. [`drop_chants_without_visible_source`]
//! 4. [`standardize_genre`]
//! 5. [`dedup_chants_by_chantlink`]
//! 6. [`apply_field_overrides`] (only when overrides are supplied)
//! 7. [`derive_num_century`]
//!
//! In a report, `records_in`/`records_out` count the pass's primary entity
//! (sources for source passes, chants for chant passes) and only `Drop`
//! actions remove primary records. Chants collapsed as a side effect of a
//! source merge are reported as `Collapse`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::century::{self, SpanRule};
use crate::fields::ChantField;
use crate::model::{Chant, Source};
use crate::table::{self, read_columns, TableError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Drop,
    Rewrite,
    Repoint,
    Collapse,
    Unapplied,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Drop => "drop",
            ActionKind::Rewrite => "rewrite",
            ActionKind::Repoint => "repoint",
            ActionKind::Collapse => "collapse",
            ActionKind::Unapplied => "unapplied",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleaningAction {
    pub record_id: String,
    pub kind: ActionKind,
    pub detail: String,
}

/// Two records a human should look at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewCandidate {
    pub first: String,
    pub second: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleaningReport {
    pub pass_name: String,
    pub records_in: usize,
    pub records_out: usize,
    pub actions: Vec<CleaningAction>,
    pub review_candidates: Vec<ReviewCandidate>,
}

impl CleaningReport {
    fn new(pass_name: &str, records_in: usize) -> Self {
        CleaningReport {
            pass_name: pass_name.to_string(),
            records_in,
            records_out: records_in,
            actions: Vec::new(),
            review_candidates: Vec::new(),
        }
    }

    fn act(&mut self, record_id: &str, kind: ActionKind, detail: impl Into<String>) {
        self.actions.push(CleaningAction {
            record_id: record_id.to_string(),
            kind,
            detail: detail.into(),
        });
    }

    pub fn drops(&self) -> usize {
        self.actions.iter().filter(|a| a.kind == ActionKind::Drop).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} -> {} ({} actions, {} review candidates)",
            self.pass_name,
            self.records_in,
            self.records_out,
            self.actions.len(),
            self.review_candidates.len()
        )
    }
}

/// All actions of `reports` as CSV: `pass,record_id,action,detail`.
pub fn actions_csv(reports: &[CleaningReport]) -> Vec<u8> {
    table::write_rows(
        &["pass", "record_id", "action", "detail"],
        reports.iter().flat_map(|r| {
            r.actions.iter().map(move |a| {
                [
                    r.pass_name.clone(),
                    a.record_id.clone(),
                    a.kind.to_string(),
                    a.detail.clone(),
                ]
            })
        }),
    )
}

/// All review candidates as CSV: `pass,first,second,reason`.
pub fn review_csv(reports: &[CleaningReport]) -> Vec<u8> {
    table::write_rows(
        &["pass", "first", "second", "reason"],
        reports.iter().flat_map(|r| {
            r.review_candidates.iter().map(move |c| {
                [
                    r.pass_name.clone(),
                    c.first.clone(),
                    c.second.clone(),
                    c.reason.clone(),
                ]
            })
        }),
    )
}

/// Replaces the genre of every chant listed in `genre_of_origin`.
pub fn standardize_genre(
    chants: &[Chant],
    genre_of_origin: &HashMap<String, String>,
) -> (Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("standardize_genre", chants.len());
    let out = chants
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if let Some(code) = genre_of_origin.get(&c.chantlink) {
                if c.genre.as_deref() != Some(code.as_str()) {
                    report.act(
                        &c.chantlink,
                        ActionKind::Rewrite,
                        format!("genre {:?} -> {code:?}", c.genre.as_deref().unwrap_or("")),
                    );
                    c.genre = crate::model::opt(code.clone());
                }
            }
            c
        })
        .collect();
    (out, report)
}

/// Keeps the first chant of each chantlink.
pub fn dedup_chants_by_chantlink(chants: &[Chant]) -> (Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("dedup_chants_by_chantlink", chants.len());
    let mut seen = HashSet::with_capacity(chants.len());
    let mut out = Vec::with_capacity(chants.len());
    for c in chants {
        if seen.insert(c.chantlink.as_str()) {
            out.push(c.clone());
        } else {
            report.act(&c.chantlink, ActionKind::Drop, "duplicate chantlink");
        }
    }
    report.records_out = out.len();
    (out, report)
}

/// Drops chants whose srclink names no source.
pub fn drop_chants_without_visible_source(
    chants: &[Chant],
    sources: &[Source],
) -> (Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("drop_chants_without_visible_source", chants.len());
    let known: HashSet<&str> = sources.iter().map(|s| s.srclink.as_str()).collect();
    let mut out = Vec::with_capacity(chants.len());
    for c in chants {
        if known.contains(c.srclink.as_str()) {
            out.push(c.clone());
        } else {
            report.act(
                &c.chantlink,
                ActionKind::Drop,
                format!("source {} not available", c.srclink),
            );
        }
    }
    report.records_out = out.len();
    (out, report)
}

/// Canonical URL schemes, keyed by the URL with its scheme removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeConcordance {
    pub default_scheme: String,
    pub overrides: HashMap<String, String>,
}

impl Default for SchemeConcordance {
    fn default() -> Self {
        SchemeConcordance {
            default_scheme: "https".into(),
            overrides: HashMap::new(),
        }
    }
}

impl SchemeConcordance {
    /// Reads `url,scheme` rows.
    pub fn from_csv(data: &[u8]) -> Result<Self, TableError> {
        let mut out = SchemeConcordance::default();
        for (i, row) in read_columns(data, &["url", "scheme"])?.into_iter().enumerate() {
            let scheme = row[1].to_ascii_lowercase();
            if scheme != "http" && scheme != "https" {
                return Err(TableError::BadRow {
                    row: i + 1,
                    message: format!("scheme `{}` is not http or https", row[1]),
                });
            }
            let key = split_scheme(&row[0]).map(|(_, rest)| rest).unwrap_or(&row[0]);
            out.overrides.insert(key.to_string(), scheme);
        }
        Ok(out)
    }
}

fn split_scheme(url: &str) -> Option<(&str, &str)> {
    let (scheme, rest) = url.split_once("://")?;
    (scheme.eq_ignore_ascii_case("http") || scheme.eq_ignore_ascii_case("https"))
        .then_some((scheme, rest))
}

/// Unifies `http`/`https` variants of the same URL across sources and
/// chants. A URL is rewritten when the concordance names its scheme or when
/// it occurs under both schemes (then the default scheme wins). Sources that
/// become identical in srclink are merged into the first one.
pub fn normalize_url_scheme(
    sources: &[Source],
    chants: &[Chant],
    concordance: &SchemeConcordance,
) -> (Vec<Source>, Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("normalize_url_scheme", sources.len());

    let mut schemes: HashMap<&str, HashSet<String>> = HashMap::new();
    let urls = sources
        .iter()
        .map(|s| s.srclink.as_str())
        .chain(chants.iter().flat_map(|c| [c.srclink.as_str(), c.chantlink.as_str()]));
    for url in urls {
        if let Some((scheme, rest)) = split_scheme(url) {
            schemes.entry(rest).or_default().insert(scheme.to_ascii_lowercase());
        }
    }
    let canonical = |url: &str| -> Option<String> {
        let (scheme, rest) = split_scheme(url)?;
        let target = match concordance.overrides.get(rest) {
            Some(s) => s.as_str(),
            None if schemes.get(rest).is_some_and(|s| s.len() > 1) => {
                concordance.default_scheme.as_str()
            }
            None => return None,
        };
        (scheme != target).then(|| format!("{target}://{rest}"))
    };

    let mut out_sources: Vec<Source> = Vec::with_capacity(sources.len());
    let mut index: HashMap<String, usize> = HashMap::new();
    for s in sources {
        let mut s = s.clone();
        if let Some(url) = canonical(&s.srclink) {
            report.act(&s.srclink, ActionKind::Rewrite, format!("srclink -> {url}"));
            s.srclink = url;
        }
        match index.get(&s.srclink) {
            Some(&kept) => {
                let kept = &out_sources[kept];
                report.act(&s.srclink, ActionKind::Drop, format!("merged into source {}", kept.srclink));
            }
            None => {
                index.insert(s.srclink.clone(), out_sources.len());
                out_sources.push(s);
            }
        }
    }

    let out_chants = chants
        .iter()
        .map(|c| {
            let mut c = c.clone();
            let original = c.chantlink.clone();
            if let Some(url) = canonical(&c.srclink) {
                report.act(&original, ActionKind::Repoint, format!("srclink -> {url}"));
                c.srclink = url;
            }
            if let Some(url) = canonical(&c.chantlink) {
                report.act(&original, ActionKind::Rewrite, format!("chantlink -> {url}"));
                c.chantlink = url;
            }
            c
        })
        .collect();

    report.records_out = out_sources.len();
    (out_sources, out_chants, report)
}

/// Merges sources that share a siglum and all metadata; chants of merged
/// sources are re-pointed to the survivor and chants that then repeat a
/// chantlink are kept once. Same-siglum sources whose metadata differ are
/// left alone and reported as review candidates.
pub fn dedup_sources_by_siglum(
    sources: &[Source],
    chants: &[Chant],
) -> (Vec<Source>, Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("dedup_sources_by_siglum", sources.len());

    let mut by_siglum: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in sources.iter().enumerate() {
        by_siglum.entry(s.siglum.as_str()).or_default().push(i);
    }

    // survivor srclink for each merged-away srclink
    let mut repoint: HashMap<&str, &str> = HashMap::new();
    let mut dropped = vec![false; sources.len()];
    for (i, s) in sources.iter().enumerate() {
        let group = &by_siglum[s.siglum.as_str()];
        if group[0] != i || group.len() < 2 {
            continue;
        }
        // representatives of distinct metadata within the group
        let mut reps: Vec<usize> = Vec::new();
        for &j in group {
            match reps.iter().find(|&&r| sources[r].same_metadata(&sources[j])) {
                Some(&r) => {
                    dropped[j] = true;
                    repoint.insert(sources[j].srclink.as_str(), sources[r].srclink.as_str());
                    report.act(
                        &sources[j].srclink,
                        ActionKind::Drop,
                        format!("identical to source {}", sources[r].srclink),
                    );
                }
                None => reps.push(j),
            }
        }
        for (a, &ra) in reps.iter().enumerate() {
            for &rb in &reps[a + 1..] {
                report.review_candidates.push(ReviewCandidate {
                    first: sources[ra].srclink.clone(),
                    second: sources[rb].srclink.clone(),
                    reason: format!(
                        "siglum `{}` shared by sources with different metadata",
                        s.siglum
                    ),
                });
            }
        }
    }

    let out_sources: Vec<Source> = sources
        .iter()
        .zip(&dropped)
        .filter(|(_, d)| !**d)
        .map(|(s, _)| s.clone())
        .collect();

    let survivors: HashSet<&str> = repoint.values().copied().collect();
    let mut out_chants = Vec::with_capacity(chants.len());
    let mut seen: HashSet<&str> = HashSet::new();
    for c in chants {
        let target = repoint.get(c.srclink.as_str()).copied();
        let merged = target.is_some() || survivors.contains(c.srclink.as_str());
        if merged && !seen.insert(c.chantlink.as_str()) {
            report.act(&c.chantlink, ActionKind::Collapse, "already present in merged source");
            continue;
        }
        let mut c = c.clone();
        if let Some(target) = target {
            report.act(&c.chantlink, ActionKind::Repoint, format!("srclink -> {target}"));
            c.srclink = target.to_string();
        }
        out_chants.push(c);
    }

    report.records_out = out_sources.len();
    (out_sources, out_chants, report)
}

/// Sets `num_century` from the `century` text.
pub fn derive_num_century(sources: &[Source], rule: SpanRule) -> (Vec<Source>, CleaningReport) {
    let mut report = CleaningReport::new("derive_num_century", sources.len());
    let out = sources
        .iter()
        .map(|s| {
            let mut s = s.clone();
            let derived = s
                .century
                .as_deref()
                .and_then(|t| century::derive_num_century_with(t, rule));
            if derived != s.num_century {
                report.act(
                    &s.srclink,
                    ActionKind::Rewrite,
                    format!(
                        "num_century {} -> {}",
                        s.num_century.map(|n| n.to_string()).unwrap_or_default(),
                        derived.map(|n| n.to_string()).unwrap_or_default()
                    ),
                );
                s.num_century = derived;
            }
            s
        })
        .collect();
    (out, report)
}

/// One row of a per-database field override table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldOverride {
    pub db: String,
    pub chantlink: String,
    pub field: ChantField,
    pub value: Option<String>,
}

/// Reads `db,chantlink,field,new_value` rows.
pub fn overrides_from_csv(data: &[u8]) -> Result<Vec<FieldOverride>, TableError> {
    read_columns(data, &["db", "chantlink", "field", "new_value"])?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let field: ChantField = row[2].parse().map_err(|e: crate::fields::UnknownColumn| {
                TableError::BadRow {
                    row: i + 1,
                    message: e.to_string(),
                }
            })?;
            if field == ChantField::Chantlink {
                return Err(TableError::BadRow {
                    row: i + 1,
                    message: "chantlink cannot be overridden".into(),
                });
            }
            Ok(FieldOverride {
                db: row[0].clone(),
                chantlink: row[1].clone(),
                field,
                value: crate::model::opt(row[3].clone()),
            })
        })
        .collect()
}

/// Applies overrides whose chantlink and db both match a chant. Overrides
/// that match nothing are reported as `Unapplied`.
pub fn apply_field_overrides(
    chants: &[Chant],
    overrides: &[FieldOverride],
) -> (Vec<Chant>, CleaningReport) {
    let mut report = CleaningReport::new("apply_field_overrides", chants.len());
    let mut by_link: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, o) in overrides.iter().enumerate() {
        by_link.entry(o.chantlink.as_str()).or_default().push(i);
    }
    let mut used = vec![false; overrides.len()];
    let out = chants
        .iter()
        .map(|c| {
            let mut c = c.clone();
            for &i in by_link.get(c.chantlink.as_str()).into_iter().flatten() {
                let o = &overrides[i];
                if o.db != c.db {
                    continue;
                }
                used[i] = true;
                if c.get(o.field) != o.value.as_deref() {
                    report.act(
                        &c.chantlink,
                        ActionKind::Rewrite,
                        format!(
                            "{} {:?} -> {:?}",
                            o.field,
                            c.get(o.field).unwrap_or(""),
                            o.value.as_deref().unwrap_or("")
                        ),
                    );
                    c.set(o.field, o.value.clone());
                }
            }
            c
        })
        .collect();
    for (o, used) in overrides.iter().zip(used) {
        if !used {
            report.act(&o.chantlink, ActionKind::Unapplied, format!("no {} chant with this chantlink", o.db));
        }
    }
    (out, report)
}

/// Reads `chantlink,genre` rows.
pub fn genre_map_from_csv(data: &[u8]) -> Result<HashMap<String, String>, TableError> {
    Ok(read_columns(data, &["chantlink", "genre"])?
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub genre_of_origin: HashMap<String, String>,
    pub schemes: SchemeConcordance,
    pub overrides: Vec<FieldOverride>,
    pub span_rule: SpanRule,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub chants: Vec<Chant>,
    pub sources: Vec<Source>,
    pub reports: Vec<CleaningReport>,
}

pub fn run_pipeline(chants: &[Chant], sources: &[Source], config: &PipelineConfig) -> PipelineOutput {
    let mut reports = Vec::new();
    let (sources, chants, r) = normalize_url_scheme(sources, chants, &config.schemes);
    reports.push(r);
    let (sources, chants, r) = dedup_sources_by_siglum(&sources, &chants);
    reports.push(r);
    let (chants, r) = drop_chants_without_visible_source(&chants, &sources);
    reports.push(r);
    let (chants, r) = standardize_genre(&chants, &config.genre_of_origin);
    reports.push(r);
    let (mut chants, r) = dedup_chants_by_chantlink(&chants);
    reports.push(r);
    if !config.overrides.is_empty() {
        let (c, r) = apply_field_overrides(&chants, &config.overrides);
        chants = c;
        reports.push(r);
    }
    let (sources, r) = derive_num_century(&sources, config.span_rule);
    reports.push(r);
    PipelineOutput {
        chants,
        sources,
        reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chant(id: &str, src: &str) -> Chant {
        Chant {
            chantlink: format!("https://x/chant/{id}"),
            incipit: "Inc".into(),
            cantus_id: "001".into(),
            siglum: "S".into(),
            folio: "1r".into(),
            srclink: src.into(),
            db: "CD".into(),
            ..Default::default()
        }
    }

    fn source(link: &str, siglum: &str) -> Source {
        Source {
            siglum: siglum.into(),
            srclink: link.into(),
            ..Default::default()
        }
    }

    #[test]
    fn genre_standardization() {
        let mut c = chant("1", "s");
        c.genre = Some("Antiphon".into());
        let map = HashMap::from([(c.chantlink.clone(), "A".to_string())]);
        let (out, report) = standardize_genre(&[c.clone(), chant("2", "s")], &map);
        assert_eq!(out[0].genre.as_deref(), Some("A"));
        assert_eq!(out[1], chant("2", "s"));
        assert_eq!(report.actions.len(), 1);
        let (out, _) = standardize_genre(&[c.clone()], &HashMap::new());
        assert_eq!(out, vec![c]);
    }

    #[test]
    fn chant_dedup_first_wins() {
        let a = chant("1", "s");
        let mut b = chant("1", "s");
        b.folio = "2v".into();
        let (out, report) = dedup_chants_by_chantlink(&[a.clone(), b, chant("2", "s")]);
        assert_eq!(out, vec![a, chant("2", "s")]);
        assert_eq!(report.records_in - report.records_out, report.drops());
        let (again, _) = dedup_chants_by_chantlink(&out);
        assert_eq!(again, out);
    }

    #[test]
    fn invisible_source_drop() {
        let chants = [chant("1", "s1"), chant("2", "s2")];
        let (out, report) = drop_chants_without_visible_source(&chants, &[source("s1", "A")]);
        assert_eq!(out.len(), 1);
        assert_eq!(report.drops(), 1);
        let (out, _) = drop_chants_without_visible_source(&chants, &[]);
        assert!(out.is_empty());
    }

    #[test]
    fn scheme_mismatch_resolves() {
        let sources = [source("http://x/1", "A")];
        let chants = [chant("1", "https://x/1")];
        let (s, c, report) = normalize_url_scheme(&sources, &chants, &SchemeConcordance::default());
        assert_eq!(s[0].srclink, "https://x/1");
        assert_eq!(c[0].srclink, "https://x/1");
        assert_eq!(report.drops(), 0);
        let (s2, c2, r2) = normalize_url_scheme(&s, &c, &SchemeConcordance::default());
        assert_eq!((s2, c2), (s, c));
        assert!(r2.actions.is_empty());
    }

    #[test]
    fn scheme_duplicates_merge() {
        let sources = [source("http://x/1", "A"), source("https://x/1", "A")];
        let (s, _, report) = normalize_url_scheme(&sources, &[], &SchemeConcordance::default());
        assert_eq!(s.len(), 1);
        assert_eq!(report.drops(), 1);
        assert_eq!(report.records_in - report.records_out, 1);
    }

    #[test]
    fn scheme_concordance_wins() {
        let sources = [source("https://x/1", "A")];
        let mut conc = SchemeConcordance::default();
        conc.overrides.insert("x/1".into(), "http".into());
        let (s, _, _) = normalize_url_scheme(&sources, &[], &conc);
        assert_eq!(s[0].srclink, "http://x/1");
        let parsed = SchemeConcordance::from_csv(b"url,scheme\nhttps://x/1,http\n").unwrap();
        assert_eq!(parsed, conc);
    }

    #[test]
    fn identical_sources_merge() {
        let sources = [source("s1", "A"), source("s2", "A")];
        let chants = [chant("1", "s1"), chant("2", "s2")];
        let (s, c, report) = dedup_sources_by_siglum(&sources, &chants);
        assert_eq!(s, vec![source("s1", "A")]);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.srclink == "s1"));
        assert_eq!(report.drops(), 1);
        assert!(report.review_candidates.is_empty());
    }

    #[test]
    fn merged_sources_keep_shared_chants_once() {
        let sources = [source("s1", "A"), source("s2", "A")];
        let chants = [chant("1", "s1"), chant("1", "s2"), chant("2", "s2")];
        let (_, c, report) = dedup_sources_by_siglum(&sources, &chants);
        assert_eq!(c.len(), 2);
        assert_eq!(
            report.actions.iter().filter(|a| a.kind == ActionKind::Collapse).count(),
            1
        );
    }

    #[test]
    fn conflicting_sources_go_to_review() {
        let mut b = source("s2", "A");
        b.century = Some("13th century".into());
        let sources = [source("s1", "A"), b];
        let (s, c, report) = dedup_sources_by_siglum(&sources, &[chant("1", "s2")]);
        assert_eq!(s.len(), 2);
        assert_eq!(c[0].srclink, "s2");
        assert_eq!(report.review_candidates.len(), 1);
        assert_eq!(report.drops(), 0);
    }

    #[test]
    fn unique_sigla_identity() {
        let sources = [source("s1", "A"), source("s2", "B")];
        let chants = [chant("1", "s1")];
        let (s, c, report) = dedup_sources_by_siglum(&sources, &chants);
        assert_eq!(s, sources.to_vec());
        assert_eq!(c, chants.to_vec());
        assert!(report.actions.is_empty());
    }

    #[test]
    fn num_century_pass() {
        let mut a = source("s1", "A");
        a.century = Some("late 13th century".into());
        let mut b = source("s2", "B");
        b.century = Some("n/a".into());
        b.num_century = Some(9);
        let (out, report) = derive_num_century(&[a, b], SpanRule::First);
        assert_eq!(out[0].num_century, Some(13));
        assert_eq!(out[1].num_century, None);
        assert_eq!(report.actions.len(), 2);
        let (again, r2) = derive_num_century(&out, SpanRule::First);
        assert_eq!(again, out);
        assert!(r2.actions.is_empty());
    }

    #[test]
    fn overrides() {
        let mut c = chant("1", "s");
        c.db = "HCD".into();
        c.office = Some("X".into());
        let table = format!(
            "db,chantlink,field,new_value\nHCD,{},office,L\nCD,{},office,M\nHCD,https://x/none,office,V\n",
            c.chantlink, c.chantlink
        );
        let overrides = overrides_from_csv(table.as_bytes()).unwrap();
        let (out, report) = apply_field_overrides(&[c], &overrides);
        assert_eq!(out[0].office.as_deref(), Some("L"));
        assert_eq!(
            report.actions.iter().filter(|a| a.kind == ActionKind::Unapplied).count(),
            2
        );
        assert!(overrides_from_csv(b"db,chantlink,field,new_value\nHCD,x,colour,L\n").is_err());
    }

    #[test]
    fn report_csvs() {
        let (_, report) = dedup_chants_by_chantlink(&[chant("1", "s"), chant("1", "s")]);
        let text = String::from_utf8(actions_csv(&[report])).unwrap();
        assert_eq!(
            text,
            "pass,record_id,action,detail\ndedup_chants_by_chantlink,https://x/chant/1,drop,duplicate chantlink\n"
        );
    }
}
