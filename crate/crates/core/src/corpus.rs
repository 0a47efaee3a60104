//! Timestamped, tokenized documents and the time series derived from them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDateTime;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M";

/// Minute-resolution instant, written as `YYYY-MM-DD HH:MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(NaiveDateTime);

impl Timestamp {
    pub fn new(inner: NaiveDateTime) -> Self {
        Self(inner)
    }

    pub fn as_datetime(&self) -> NaiveDateTime {
        self.0
    }
}

impl FromStr for Timestamp {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT).map(Self)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(TIMESTAMP_FORMAT))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// A row as read from disk, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub timestamp: Timestamp,
    pub text: String,
    pub is_retweet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub timestamp: Timestamp,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, timestamp: Timestamp, tokens: Vec<String>) -> Self {
        Self {
            id: id.into(),
            timestamp,
            tokens,
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.tokens.iter().any(|t| t == term)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TermStats {
    /// Occurrences across all documents.
    pub count: u64,
    /// Number of documents containing the term at least once.
    pub doc_freq: u64,
}

/// An immutable, timestamp-ordered document collection with vocabulary
/// statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corpus {
    documents: Vec<Document>,
    vocabulary: BTreeMap<String, TermStats>,
    total_token_count: u64,
}

impl Corpus {
    /// Sorts documents by timestamp (stable, so ties keep input order) and
    /// derives the vocabulary.
    pub fn from_documents(mut documents: Vec<Document>) -> Self {
        documents.sort_by_key(|d| d.timestamp);
        let mut vocabulary: BTreeMap<String, TermStats> = BTreeMap::new();
        let mut total_token_count = 0u64;
        for doc in &documents {
            for (i, token) in doc.tokens.iter().enumerate() {
                let stats = vocabulary.entry(token.clone()).or_default();
                stats.count += 1;
                if !doc.tokens[..i].contains(token) {
                    stats.doc_freq += 1;
                }
                total_token_count += 1;
            }
        }
        Self {
            documents,
            vocabulary,
            total_token_count,
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Terms in lexicographic order with their counts.
    pub fn vocabulary(&self) -> &BTreeMap<String, TermStats> {
        &self.vocabulary
    }

    pub fn term_stats(&self, term: &str) -> Option<TermStats> {
        self.vocabulary.get(term).copied()
    }

    pub fn total_token_count(&self) -> u64 {
        self.total_token_count
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub timestamp: Timestamp,
    pub value: f64,
}

/// Token count per document, in corpus order.
pub fn tweet_length_series(corpus: &Corpus) -> Vec<SeriesPoint> {
    corpus
        .documents()
        .iter()
        .map(|d| SeriesPoint {
            timestamp: d.timestamp,
            value: d.tokens.len() as f64,
        })
        .collect()
}

/// 1 where the document mentions `event`, 0 elsewhere.
pub fn event_occurrence_series(corpus: &Corpus, event: &str) -> Vec<SeriesPoint> {
    corpus
        .documents()
        .iter()
        .map(|d| SeriesPoint {
            timestamp: d.timestamp,
            value: if d.contains(event) { 1.0 } else { 0.0 },
        })
        .collect()
}

/// Dataset summary: document and word counts plus the covered time span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub documents: usize,
    pub vocabulary: usize,
    pub tokens: u64,
    pub mean_tokens_per_document: f64,
    pub first_timestamp: Option<Timestamp>,
    pub last_timestamp: Option<Timestamp>,
}

pub fn corpus_stats(corpus: &Corpus) -> StatsReport {
    let docs = corpus.documents();
    let mean = if docs.is_empty() {
        0.0
    } else {
        corpus.total_token_count() as f64 / docs.len() as f64
    };
    StatsReport {
        documents: docs.len(),
        vocabulary: corpus.vocabulary().len(),
        tokens: corpus.total_token_count(),
        mean_tokens_per_document: mean,
        first_timestamp: docs.first().map(|d| d.timestamp),
        last_timestamp: docs.last().map(|d| d.timestamp),
    }
}
