//! Free-text century descriptions to century numbers.
//!
//! Recognized, in order of precedence:
//!
//! 1. ordinal centuries: `13th century`, `late 13th century`,
//!    `12th/13th century` (when several ordinals occur, [`SpanRule`] picks one);
//! 2. years and year ranges: `c.1250`, `1225-1250`, `possibly around 1225-50`
//!    (a short second year borrows the leading digits of the first); a range
//!    maps to the century of its midpoint.
//!
//! Qualifiers such as `early`, `ca.`, `possibly` or `?` carry no weight and
//! are skipped. Anything else yields `None`. Results outside 1..=21 are
//! rejected.

use std::sync::LazyLock;

use regex::Regex;

pub const MIN_CENTURY: u32 = 1;
pub const MAX_CENTURY: u32 = 21;

/// Which century to report when a text names several ordinal centuries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SpanRule {
    #[default]
    First,
    Latest,
    /// Floor of the mean of the first and last named centuries.
    Midpoint,
}

static ORDINAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{1,2})\s*(?:st|nd|rd|th)\b").unwrap());
static CENTURY_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\bcent(?:ury|uries|\.)?").unwrap());
static YEAR_RANGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:^|\D)(\d{3,4})(?:\s*[-–/]\s*(\d{1,4}))?(?:\D|$)").unwrap());

/// Century containing `year` (years 1–100 are the first century).
pub fn century_of_year(year: u32) -> u32 {
    (year.saturating_sub(1)) / 100 + 1
}

pub fn derive_num_century(text: &str) -> Option<u32> {
    derive_num_century_with(text, SpanRule::First)
}

pub fn derive_num_century_with(text: &str, rule: SpanRule) -> Option<u32> {
    let text = text.trim().to_lowercase();
    if text.is_empty() {
        return None;
    }

    if CENTURY_WORD.is_match(&text) {
        let ordinals: Vec<u32> = ORDINAL
            .captures_iter(&text)
            .filter_map(|c| c[1].parse().ok())
            .collect();
        if let (Some(first), Some(last)) = (ordinals.first(), ordinals.last()) {
            let n = match rule {
                SpanRule::First => *first,
                SpanRule::Latest => *ordinals.iter().max().unwrap(),
                SpanRule::Midpoint => (first + last) / 2,
            };
            return in_range(n);
        }
    }

    let caps = YEAR_RANGE.captures(&text)?;
    let start: u32 = caps[1].parse().ok()?;
    let end = match caps.get(2) {
        None => start,
        Some(m) => expand_range_end(&caps[1], m.as_str())?,
    };
    in_range(century_of_year((start + end) / 2))
}

/// `("1225", "50")` → 1250; `("1290", "10")` → 1310.
fn expand_range_end(start: &str, end: &str) -> Option<u32> {
    let start_n: u32 = start.parse().ok()?;
    if end.len() >= start.len() {
        let end_n: u32 = end.parse().ok()?;
        return (end_n >= start_n).then_some(end_n);
    }
    let prefix = &start[..start.len() - end.len()];
    let mut end_n: u32 = format!("{prefix}{end}").parse().ok()?;
    if end_n < start_n {
        end_n += 10u32.pow(end.len() as u32);
    }
    Some(end_n)
}

fn in_range(n: u32) -> Option<u32> {
    (MIN_CENTURY..=MAX_CENTURY).contains(&n).then_some(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_examples() {
        for text in [
            "13th century",
            "c.1250",
            "late 13th century",
            "possibly around 1225-50",
        ] {
            assert_eq!(derive_num_century(text), Some(13), "{text}");
        }
    }

    #[test]
    fn empty_and_unparseable() {
        assert_eq!(derive_num_century(""), None);
        assert_eq!(derive_num_century("   "), None);
        assert_eq!(derive_num_century("unknown"), None);
        assert_eq!(derive_num_century("s. XIII"), None);
        assert_eq!(derive_num_century("25th century"), None);
    }

    #[test]
    fn spans() {
        assert_eq!(derive_num_century("12th/13th century"), Some(12));
        assert_eq!(derive_num_century_with("12th/13th century", SpanRule::Latest), Some(13));
        assert_eq!(derive_num_century_with("11th-13th centuries", SpanRule::Midpoint), Some(12));
        assert_eq!(derive_num_century("1st century"), Some(1));
        assert_eq!(derive_num_century("early 2nd century?"), Some(2));
    }

    #[test]
    fn years() {
        assert_eq!(derive_num_century("1300"), Some(13));
        assert_eq!(derive_num_century("1301"), Some(14));
        assert_eq!(derive_num_century("ca. 1450-1470"), Some(15));
        assert_eq!(derive_num_century("1290-10"), Some(13));
        assert_eq!(derive_num_century("circa 980"), Some(10));
        assert_eq!(derive_num_century("after 1200 (?)"), Some(12));
    }

    #[test]
    fn range_end_expansion() {
        assert_eq!(expand_range_end("1225", "50"), Some(1250));
        assert_eq!(expand_range_end("1225", "1250"), Some(1250));
        assert_eq!(expand_range_end("1290", "10"), Some(1310));
        assert_eq!(expand_range_end("1250", "1225"), None);
    }
}
