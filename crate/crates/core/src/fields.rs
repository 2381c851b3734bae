//! Column vocabularies of the chants and sources tables.
//!
//! The declaration order of each enum is the column order of the exported
//! CSV files; `ALL` lists the variants in that order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! column_enum {
    (
        $(#[$meta:meta])*
        $name:ident { $($variant:ident => $col:literal $(required $req:tt)?),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $col),+
                }
            }

            pub fn is_required(self) -> bool {
                match self {
                    $($name::$variant => column_enum!(@req $($req)?)),+
                }
            }

            pub fn header() -> Vec<&'static str> {
                Self::ALL.iter().map(|f| f.as_str()).collect()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownColumn;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($col => Ok($name::$variant),)+
                    _ => Err(UnknownColumn(s.to_string())),
                }
            }
        }
    };
    (@req yes) => { true };
    (@req) => { false };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown column `{0}`")]
pub struct UnknownColumn(pub String);

column_enum! {
    /// Columns of `chants.csv`.
    ChantField {
        Chantlink => "chantlink" required yes,
        Incipit => "incipit" required yes,
        CantusId => "cantus_id" required yes,
        Mode => "mode",
        Siglum => "siglum" required yes,
        Position => "position",
        Folio => "folio" required yes,
        Sequence => "sequence",
        Feast => "feast",
        FeastCode => "feast_code",
        Genre => "genre",
        Office => "office",
        Srclink => "srclink" required yes,
        MelodyId => "melody_id",
        FullText => "full_text",
        Melody => "melody",
        Db => "db" required yes,
        Image => "image",
    }
}

column_enum! {
    /// Columns of `sources.csv`.
    SourceField {
        Title => "title",
        Siglum => "siglum" required yes,
        Century => "century",
        Provenance => "provenance",
        Srclink => "srclink" required yes,
        Cursus => "cursus",
        NumCentury => "num_century",
    }
}

/// Which of the two tables a field or record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    Chant,
    Source,
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entity::Chant => "chant",
            Entity::Source => "source",
        })
    }
}

impl FromStr for Entity {
    type Err = UnknownColumn;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chant" => Ok(Entity::Chant),
            "source" => Ok(Entity::Source),
            _ => Err(UnknownColumn(s.to_string())),
        }
    }
}
