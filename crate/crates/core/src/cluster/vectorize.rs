use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::rank::ContextVector;

/// Document weighting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Raw term counts.
    Tf,
    /// Term count times log2(N / df).
    Tfidf,
    /// Term count times the term's smallest ranked weight across the context
    /// vectors; terms tied to no event are dropped.
    Thematic,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Tf, Scheme::Tfidf, Scheme::Thematic];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tf => "tf",
            Scheme::Tfidf => "tfidf",
            Scheme::Thematic => "thematic",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tf" => Ok(Scheme::Tf),
            "tfidf" | "tf-idf" => Ok(Scheme::Tfidf),
            "thematic" => Ok(Scheme::Thematic),
            other => Err(format!("unknown scheme {other:?} (expected tf, tfidf or thematic)")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A sparse document embedding. Zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocVector {
    pub doc_id: String,
    pub components: BTreeMap<String, f64>,
}

impl DocVector {
    pub fn new(doc_id: impl Into<String>, components: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self {
            doc_id: doc_id.into(),
            components: components.into_iter().filter(|(_, w)| *w != 0.0).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.components.get(term).copied().unwrap_or(0.0)
    }
}

fn term_counts(tokens: &[String]) -> BTreeMap<&str, f64> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    counts
}

/// Embeds every document of `corpus`, in corpus order.
pub fn vectorize(corpus: &Corpus, scheme: Scheme, context: Option<&[ContextVector]>) -> Result<Vec<DocVector>> {
    let n = corpus.len() as f64;
    let thematic: Option<BTreeMap<&str, f64>> = match scheme {
        Scheme::Thematic => {
            let context = context.filter(|c| !c.is_empty()).ok_or(Error::MissingContext)?;
            let mut best: BTreeMap<&str, f64> = BTreeMap::new();
            for entry in context.iter().flat_map(|cv| &cv.entries) {
                best.entry(entry.keyword.as_str())
                    .and_modify(|w| *w = w.min(entry.ranked_weight))
                    .or_insert(entry.ranked_weight);
            }
            Some(best)
        }
        _ => None,
    };

    let vectors = corpus
        .documents()
        .iter()
        .map(|doc| {
            let components = term_counts(&doc.tokens).into_iter().filter_map(|(term, tf)| {
                let weight = match scheme {
                    Scheme::Tf => tf,
                    Scheme::Tfidf => {
                        let df = corpus.term_stats(term).map_or(0, |s| s.doc_freq) as f64;
                        tf * (n / df).log2()
                    }
                    Scheme::Thematic => tf * *thematic.as_ref()?.get(term)?,
                };
                Some((term.to_string(), weight))
            });
            DocVector::new(doc.id.clone(), components)
        })
        .collect();
    Ok(vectors)
}

/// Splits off empty vectors, returning the kept vectors and the skipped count.
pub fn drop_empty(vectors: Vec<DocVector>) -> (Vec<DocVector>, usize) {
    let before = vectors.len();
    let kept: Vec<DocVector> = vectors.into_iter().filter(|v| !v.is_empty()).collect();
    let skipped = before - kept.len();
    (kept, skipped)
}
