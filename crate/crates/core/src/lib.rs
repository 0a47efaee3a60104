//! Event-conditioned keyword association for timestamped short-text corpora.
//!
//! The pipeline reads a corpus ([`ingest`]), indexes which documents contain
//! which terms ([`CooccurrenceIndex`]), scores every keyword against the
//! events named in a query by its uncertainty `1 − C(j)·H_j(i)`, and ranks
//! the results into per-event [`ContextVector`]s. The [`cluster`] module
//! embeds documents under TF, TF-IDF or context-vector weighting and compares
//! the schemes by K-means silhouette.

pub mod cluster;
pub mod cooccur;
pub mod corpus;
mod error;
pub mod ingest;
pub mod rank;
pub mod synthetic;
pub mod text;

pub use cluster::{
    compare_methods, elbow_select, inertia_curve, kmeans, silhouette, vectorize, ClusteringResult, CompareOptions,
    ComparisonReport, DocVector, KMeansParams, KPolicy, Scheme,
};
pub use cooccur::{CooccurrenceIndex, CountMode, UncertaintyRecord};
pub use corpus::{
    corpus_stats, event_occurrence_series, tweet_length_series, Corpus, Document, RawDocument, SeriesPoint,
    StatsReport, Timestamp,
};
pub use error::{Error, Result};
pub use ingest::{ingest, ingest_with_report, Format, IngestReport};
pub use rank::{
    build_ulist, extract_events, partition_certainty, rank, top_k, Certainty, ContextEntry, ContextVector, EventSet,
    LabelFilter, Ulist, DEFAULT_CERTAINTY_THRESHOLD,
};
pub use text::{normalize_tokenize, IngestOptions, StopwordList};

/// Serializes through `serde_json::Value`, whose object map keeps keys
/// sorted, and pretty-prints with a trailing newline.
pub fn to_sorted_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable value");
    let mut out = serde_json::to_string_pretty(&value).expect("JSON value prints");
    out.push('\n');
    out
}
