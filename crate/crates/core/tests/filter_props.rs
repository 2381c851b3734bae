mod support;

use cantus_core::{apply_filter, export_filter, parse_filter, ChantField, Corpus, FilterConfig, SourceField};
use proptest::prelude::*;

/// Hand-written config text with maps and value lists in reverse order.
fn reversed_text(f: &FilterConfig) -> String {
    fn section<F: ToString>(out: &mut String, name: &str, map: &std::collections::BTreeMap<F, std::collections::BTreeSet<String>>) {
        if map.is_empty() {
            return;
        }
        out.push_str(&format!("{name}:\n"));
        for (field, values) in map.iter().rev() {
            let vals: Vec<String> = values.iter().rev().map(|v| format!("{v:?}")).collect();
            out.push_str(&format!("  {}: [{}]\n", field.to_string(), vals.join(", ")));
        }
    }
    let mut out = String::new();
    if !f.drop_sources_without_chants {
        out.push_str("drop_sources_without_chants: false\n");
    }
    if !f.drop_chants_without_source {
        out.push_str("drop_chants_without_source: false\n");
    }
    if let Some((lo, hi)) = f.century_range {
        out.push_str(&format!("century_range: [{lo}, {hi}]\n"));
    }
    if let Some(subs) = &f.incipit_contains {
        let vals: Vec<String> = subs.iter().rev().map(|v| format!("{:?}", v.to_uppercase())).collect();
        out.push_str(&format!("incipit_contains: [{}]\n", vals.join(", ")));
    }
    if let Some(n) = f.min_melody_notes {
        out.push_str(&format!("min_melody_notes: {n}\n"));
    }
    if let Some(b) = f.has_melody {
        out.push_str(&format!("has_melody: {b}\n"));
    }
    section(&mut out, "source_exclude", &f.source_exclude);
    section(&mut out, "source_include", &f.source_include);
    section(&mut out, "chant_exclude", &f.chant_exclude);
    section(&mut out, "chant_include", &f.chant_include);
    out.push_str("version: 1\n");
    out
}

fn counts(c: &Corpus) -> (usize, usize) {
    (c.chants().len(), c.sources().len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn replicable_idempotent_and_matches_oracle(f in support::arb_filter_config()) {
        let corpus = support::fixture_corpus();
        let out = apply_filter(&corpus, &f).unwrap();

        let text = export_filter(&f);
        let reparsed = parse_filter(&text).unwrap();
        prop_assert_eq!(export_filter(&reparsed), text.clone());
        prop_assert_eq!(&apply_filter(&corpus, &reparsed).unwrap(), &out);

        prop_assert_eq!(&apply_filter(&out, &f).unwrap(), &out);

        let (chants, sources) = support::fixture_records();
        prop_assert_eq!(support::record_ids(&out), support::oracle_filter(&chants, &sources, &f));

        let last = out.history().last().unwrap();
        prop_assert_eq!(&last.op_name, "filter");
        prop_assert_eq!((last.chants_before, last.chants_after), (100, out.chants().len()));

        if f.drop_chants_without_source && f.drop_sources_without_chants {
            prop_assert!(Corpus::new(out.chants().to_vec(), out.sources().to_vec(), false).is_ok());
        }
    }

    #[test]
    fn widening_include_never_shrinks(
        f in support::arb_filter_config(),
        genre in prop_oneof![Just("A"), Just("R"), Just("H")],
        cursus in prop_oneof![Just("Secular"), Just("Monastic")],
    ) {
        let corpus = support::fixture_corpus();
        let base = counts(&apply_filter(&corpus, &f).unwrap());

        let mut wider = f.clone();
        if let Some(vals) = wider.chant_include.get_mut(&ChantField::Genre) {
            vals.insert(genre.to_string());
        }
        if let Some(vals) = wider.source_include.get_mut(&SourceField::Cursus) {
            vals.insert(cursus.to_string());
        }
        let (c, _) = counts(&apply_filter(&corpus, &wider).unwrap());
        prop_assert!(c >= base.0);
    }

    #[test]
    fn widening_exclude_never_grows(
        f in support::arb_filter_config(),
        genre in prop_oneof![Just("A"), Just("R"), Just("H")],
        cursus in prop_oneof![Just("Secular"), Just("Monastic")],
    ) {
        let corpus = support::fixture_corpus();
        let base = counts(&apply_filter(&corpus, &f).unwrap());

        let mut narrower = f.clone();
        narrower.chant_exclude.entry(ChantField::Genre).or_default().insert(genre.to_string());
        let (c, _) = counts(&apply_filter(&corpus, &narrower).unwrap());
        prop_assert!(c <= base.0);

        let mut narrower = f.clone();
        narrower.source_exclude.entry(SourceField::Cursus).or_default().insert(cursus.to_string());
        let (c, _) = counts(&apply_filter(&corpus, &narrower).unwrap());
        if f.drop_chants_without_source {
            prop_assert!(c <= base.0);
        }
    }

    #[test]
    fn list_order_does_not_change_export(f in support::arb_filter_config()) {
        let text = export_filter(&f);
        prop_assert_eq!(export_filter(&parse_filter(&reversed_text(&f)).unwrap()), text);
    }
}

#[test]
fn permissive_config_keeps_everything() {
    let corpus = support::fixture_corpus();
    let out = apply_filter(&corpus, &FilterConfig::default()).unwrap();
    // two fixture sources hold no chants
    assert_eq!(counts(&out), (100, 10));
    let keep_all = FilterConfig {
        drop_sources_without_chants: false,
        ..Default::default()
    };
    assert_eq!(apply_filter(&corpus, &keep_all).unwrap(), corpus);
}

#[test]
fn locked_input_is_untouched() {
    let corpus = support::fixture_corpus().lock();
    let f = parse_filter("version: 1\nchant_include:\n  genre: [A]\n").unwrap();
    let out = apply_filter(&corpus, &f).unwrap();
    assert!(out.chants().iter().all(|c| c.genre.as_deref() == Some("A")));
    assert_eq!(corpus.chants().len(), 100);
}

#[test]
fn reordered_lists_export_identically() {
    let a = parse_filter("version: 1\nchant_include:\n  genre: [R, A]\n  db: [SEMM, CD]\n").unwrap();
    let b = parse_filter("version: 1\nchant_include:\n  db: [CD, SEMM]\n  genre: [A, R]\n").unwrap();
    assert_eq!(export_filter(&a), export_filter(&b));
}
