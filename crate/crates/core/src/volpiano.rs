//! Character classes of the Volpiano melody encoding.
//!
//! Volpiano is a font encoding: each character is a glyph. This module only
//! needs to know which glyphs are notes, which are structural (clefs,
//! barlines, hyphens) and which are noise. The assignment below is this
//! crate's convention; `CLASS_TABLE` is the single place to correct it.

use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolpianoCharClass {
    Clef,
    Pitch,
    LiquescentPitch,
    Accidental,
    Barline,
    SyllableHyphen,
    MissingPitchMarker,
    Other,
}

impl VolpianoCharClass {
    pub fn is_note(self) -> bool {
        matches!(
            self,
            VolpianoCharClass::Pitch | VolpianoCharClass::LiquescentPitch
        )
    }
}

/// Character class table. Characters not listed are `Other`.
pub const CLASS_TABLE: &[(VolpianoCharClass, &str)] = &[
    (VolpianoCharClass::Clef, "12"),
    (VolpianoCharClass::Pitch, "89abcdefghjklmnopqrs"),
    (VolpianoCharClass::LiquescentPitch, "ABCDEFGHJKLMNOPQRS"),
    (VolpianoCharClass::Accidental, "iyzIYZwWxX"),
    (VolpianoCharClass::Barline, "34"),
    (VolpianoCharClass::SyllableHyphen, "-"),
    (VolpianoCharClass::MissingPitchMarker, "6"),
];

/// Hyphen runs longer than this are shortened to it.
pub const MAX_HYPHEN_RUN: usize = 3;

static ASCII_CLASSES: LazyLock<[VolpianoCharClass; 128]> = LazyLock::new(|| {
    let mut table = [VolpianoCharClass::Other; 128];
    for (class, chars) in CLASS_TABLE {
        for c in chars.bytes() {
            table[c as usize] = *class;
        }
    }
    table
});

pub fn classify_char(c: char) -> VolpianoCharClass {
    if c.is_ascii() {
        ASCII_CLASSES[c as usize]
    } else {
        VolpianoCharClass::Other
    }
}

/// Number of pitch and liquescent-pitch characters.
pub fn count_notes(melody: &str) -> usize {
    melody.chars().filter(|c| classify_char(*c).is_note()).count()
}

/// Drops `Other` characters and shortens hyphen runs to `MAX_HYPHEN_RUN`.
pub fn clean_melody(melody: &str) -> String {
    let mut out = String::with_capacity(melody.len());
    let mut run = 0;
    for c in melody.chars() {
        match classify_char(c) {
            VolpianoCharClass::Other => {}
            VolpianoCharClass::SyllableHyphen => {
                run += 1;
                if run <= MAX_HYPHEN_RUN {
                    out.push(c);
                }
            }
            _ => {
                run = 0;
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use VolpianoCharClass::*;

    #[test]
    fn class_examples() {
        assert_eq!(classify_char('1'), Clef);
        assert_eq!(classify_char('f'), Pitch);
        assert_eq!(classify_char('F'), LiquescentPitch);
        assert_eq!(classify_char('i'), Accidental);
        assert_eq!(classify_char('I'), Accidental);
        assert_eq!(classify_char('3'), Barline);
        assert_eq!(classify_char('-'), SyllableHyphen);
        assert_eq!(classify_char('6'), MissingPitchMarker);
        assert_eq!(classify_char('t'), Other);
        assert_eq!(classify_char('é'), Other);
    }

    #[test]
    fn table_is_a_partition() {
        let mut seen = std::collections::HashSet::new();
        for (_, chars) in CLASS_TABLE {
            for c in chars.chars() {
                assert!(seen.insert(c), "{c:?} listed twice");
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_notes("1---f--g---f"), 3);
        assert_eq!(count_notes(""), 0);
        assert_eq!(count_notes("1---"), 0);
        assert_eq!(count_notes("1---iF-j"), 2);
    }

    #[test]
    fn clean_examples() {
        assert_eq!(clean_melody("1--?-f"), "1---f");
        assert_eq!(clean_melody("1--x-f"), "1--x-f");
        assert_eq!(clean_melody("1------f--g"), "1---f--g");
        assert_eq!(clean_melody("1---f--g3"), "1---f--g3");
    }
}
