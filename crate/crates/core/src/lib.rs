//! Tooling for chant catalogue corpora: the chant/source data model, CSV
//! loading and export, cleaning passes, replicable filters, corpus
//! statistics and Cantus ID linkage for outside datasets.

pub mod century;
pub mod cleanse;
pub mod corpus;
pub mod fields;
pub mod filter;
pub mod ingest;
pub mod linkage;
pub mod model;
pub mod stats;
pub mod table;
pub mod volpiano;

pub use corpus::{Corpus, CorpusError, CorpusOptions, HistoryEntry};
pub use fields::{ChantField, Entity, SourceField};
pub use filter::{apply_filter, export_filter, parse_filter, FilterConfig, FilterError};
pub use model::{Chant, Cursus, Melody, Source};
