//! Document-incidence statistics and the uncertainty formulas built on them.
//!
//! All probabilities are document probabilities: the share of documents that
//! contain a term. The contextual entropy is evaluated exactly as
//!
//! ```text
//! H_j(i) = -( P(j)·log2(1/P(j)) + P(i)·log2(1/P(i)) + P(i|j)·log2 P(i|j) )
//! ```
//!
//! with the third summand carrying the opposite sign convention of the first
//! two, and `0·log2(0) = 0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// How the event count `C(j)` enters the information gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Number of documents containing the event.
    #[default]
    Raw,
    /// Raw count divided by the number of documents.
    Normalized,
}

impl std::str::FromStr for CountMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(CountMode::Raw),
            "normalized" => Ok(CountMode::Normalized),
            other => Err(format!("unknown count mode {other:?} (expected raw or normalized)")),
        }
    }
}

impl std::fmt::Display for CountMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountMode::Raw => "raw",
            CountMode::Normalized => "normalized",
        })
    }
}

/// Term → sorted list of indices of the documents containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceIndex {
    incidence: BTreeMap<String, Vec<usize>>,
    term_counts: BTreeMap<String, u64>,
    total_token_count: u64,
    doc_count: usize,
}

/// p·log2(1/p), zero at p = 0.
fn surprisal_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

impl CooccurrenceIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let mut incidence: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (d, doc) in corpus.documents().iter().enumerate() {
            for token in &doc.tokens {
                let docs = incidence.entry(token.clone()).or_default();
                if docs.last() != Some(&d) {
                    docs.push(d);
                }
            }
        }
        let term_counts = corpus
            .vocabulary()
            .iter()
            .map(|(term, stats)| (term.clone(), stats.count))
            .collect();
        Self {
            incidence,
            term_counts,
            total_token_count: corpus.total_token_count(),
            doc_count: corpus.len(),
        }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn total_token_count(&self) -> u64 {
        self.total_token_count
    }

    /// Corpus-wide occurrences of `term`.
    pub fn term_count(&self, term: &str) -> u64 {
        self.term_counts.get(term).copied().unwrap_or(0)
    }

    /// Terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.incidence.keys().map(String::as_str)
    }

    pub fn incidence(&self, term: &str) -> &[usize] {
        self.incidence.get(term).map_or(&[], Vec::as_slice)
    }

    /// The full incidence table, for debug dumps.
    pub fn incidence_table(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.incidence
    }

    /// Number of documents containing both terms.
    pub fn pair_count(&self, a: &str, b: &str) -> usize {
        let (xs, ys) = (self.incidence(a), self.incidence(b));
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < xs.len() && j < ys.len() {
            match xs[i].cmp(&ys[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// P(term): share of documents containing `term`.
    pub fn term_probability(&self, term: &str) -> Result<f64> {
        if self.doc_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(self.incidence(term).len() as f64 / self.doc_count as f64)
    }

    /// P(keyword | event): share of event documents that also contain the keyword.
    pub fn conditional_probability(&self, keyword: &str, event: &str) -> Result<f64> {
        let event_docs = self.incidence(event).len();
        if event_docs == 0 {
            return Err(Error::UndefinedConditional(event.to_string()));
        }
        Ok(self.pair_count(keyword, event) as f64 / event_docs as f64)
    }

    /// C(j): how often the event occurs across the series.
    pub fn event_count(&self, event: &str, mode: CountMode) -> f64 {
        let raw = self.incidence(event).len() as f64;
        match mode {
            CountMode::Raw => raw,
            CountMode::Normalized if self.doc_count == 0 => 0.0,
            CountMode::Normalized => raw / self.doc_count as f64,
        }
    }

    /// Co-occurrence guard: true when the binary incidence vectors of the two
    /// terms have a nonzero cosine, i.e. they share at least one document.
    pub fn cooccurs(&self, keyword: &str, event: &str) -> bool {
        self.pair_count(keyword, event) > 0
    }

    /// H_j(i), the contextual entropy of event `event` given `keyword`.
    pub fn contextual_entropy(&self, keyword: &str, event: &str) -> Result<f64> {
        let p_cond = self.conditional_probability(keyword, event)?;
        let p_event = self.term_probability(event)?;
        let p_keyword = self.term_probability(keyword)?;
        // p·log2(p) is the negated surprisal term. Subtracting from 0.0
        // keeps a degenerate result at +0 rather than -0.
        Ok(0.0 - (surprisal_term(p_event) + surprisal_term(p_keyword) - surprisal_term(p_cond)))
    }

    /// IG_j(i) = C(j) · H_j(i).
    pub fn information_gain(&self, keyword: &str, event: &str, mode: CountMode) -> Result<f64> {
        Ok(self.event_count(event, mode) * self.contextual_entropy(keyword, event)?)
    }

    /// UN_j(i) = 1 − IG_j(i).
    pub fn uncertainty(&self, keyword: &str, event: &str, mode: CountMode) -> Result<f64> {
        Ok(1.0 - self.information_gain(keyword, event, mode)?)
    }

    /// UN_j(i) + Count(i) / total token count.
    pub fn ranked_weight(&self, keyword: &str, event: &str, mode: CountMode) -> Result<f64> {
        if self.total_token_count == 0 {
            return Err(Error::ZeroTotal);
        }
        let share = self.term_count(keyword) as f64 / self.total_token_count as f64;
        Ok(self.uncertainty(keyword, event, mode)? + share)
    }

    /// All four quantities for one (keyword, event) pair.
    pub fn record(&self, keyword: &str, event: &str, mode: CountMode) -> Result<UncertaintyRecord> {
        if self.total_token_count == 0 {
            return Err(Error::ZeroTotal);
        }
        let entropy = self.contextual_entropy(keyword, event)?;
        let info_gain = self.event_count(event, mode) * entropy;
        let uncertainty = 1.0 - info_gain;
        let share = self.term_count(keyword) as f64 / self.total_token_count as f64;
        Ok(UncertaintyRecord {
            event: event.to_string(),
            keyword: keyword.to_string(),
            entropy,
            info_gain,
            uncertainty,
            ranked_weight: uncertainty + share,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyRecord {
    pub event: String,
    pub keyword: String,
    pub entropy: f64,
    pub info_gain: f64,
    pub uncertainty: f64,
    pub ranked_weight: f64,
}
