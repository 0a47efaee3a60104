//! Query-to-event extraction and ranking of keyword associations into
//! thematic context vectors.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooccur::{CooccurrenceIndex, CountMode, UncertaintyRecord};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::text::{normalize_tokenize, IngestOptions};

/// Threshold separating certain from uncertain associations.
pub const DEFAULT_CERTAINTY_THRESHOLD: f64 = 1.0;

/// Query terms that occur in the corpus, in query order without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EventSet {
    events: Vec<String>,
}

impl EventSet {
    pub fn as_slice(&self) -> &[String] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(String::as_str)
    }
}

pub fn extract_events(query: &str, corpus: &Corpus, options: &IngestOptions) -> EventSet {
    let mut events: Vec<String> = Vec::new();
    for token in normalize_tokenize(query, options) {
        if corpus.term_stats(&token).is_some() && !events.contains(&token) {
            events.push(token);
        }
    }
    EventSet { events }
}

/// Guarded (keyword, event) records in event order, then vocabulary order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ulist {
    pub records: Vec<UncertaintyRecord>,
}

pub fn build_ulist(index: &CooccurrenceIndex, events: &EventSet, mode: CountMode) -> Result<Ulist> {
    let per_event: Vec<Vec<UncertaintyRecord>> = events
        .as_slice()
        .par_iter()
        .map(|event| {
            index
                .terms()
                .filter(|keyword| keyword != event && index.cooccurs(keyword, event))
                .map(|keyword| index.record(keyword, event, mode))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Ulist {
        records: per_event.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Certain,
    Uncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelFilter {
    Certain,
    Uncertain,
    #[default]
    All,
}

impl std::str::FromStr for LabelFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certain" => Ok(LabelFilter::Certain),
            "uncertain" => Ok(LabelFilter::Uncertain),
            "all" => Ok(LabelFilter::All),
            other => Err(format!("unknown label {other:?} (expected certain, uncertain or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub keyword: String,
    pub entropy: f64,
    pub info_gain: f64,
    pub uncertainty: f64,
    pub ranked_weight: f64,
    /// Unset until [`partition_certainty`] runs.
    pub label: Option<Certainty>,
}

impl From<UncertaintyRecord> for ContextEntry {
    fn from(r: UncertaintyRecord) -> Self {
        Self {
            keyword: r.keyword,
            entropy: r.entropy,
            info_gain: r.info_gain,
            uncertainty: r.uncertainty,
            ranked_weight: r.ranked_weight,
            label: None,
        }
    }
}

/// The ranked keywords of one event, most certain first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextVector {
    pub event: String,
    pub entries: Vec<ContextEntry>,
}

/// Groups records by event (first-appearance order) and sorts each group by
/// ascending ranked weight, ties by keyword.
pub fn rank(ulist: Ulist) -> Vec<ContextVector> {
    let mut vectors: Vec<ContextVector> = Vec::new();
    for record in ulist.records {
        match vectors.iter_mut().find(|cv| cv.event == record.event) {
            Some(cv) => cv.entries.push(record.into()),
            None => vectors.push(ContextVector {
                event: record.event.clone(),
                entries: vec![record.into()],
            }),
        }
    }
    for cv in &mut vectors {
        cv.entries.sort_by(|a, b| {
            a.ranked_weight
                .total_cmp(&b.ranked_weight)
                .then_with(|| a.keyword.cmp(&b.keyword))
        });
    }
    vectors
}

/// Labels entries whose ranked weight falls below `threshold` as certain.
pub fn partition_certainty(mut cv: ContextVector, threshold: f64) -> ContextVector {
    for entry in &mut cv.entries {
        entry.label = Some(if entry.ranked_weight < threshold {
            Certainty::Certain
        } else {
            Certainty::Uncertain
        });
    }
    cv
}

pub fn top_k(cv: &ContextVector, k: usize, filter: LabelFilter) -> ContextVector {
    let entries = cv
        .entries
        .iter()
        .filter(|e| match filter {
            LabelFilter::All => true,
            LabelFilter::Certain => e.label == Some(Certainty::Certain),
            LabelFilter::Uncertain => e.label == Some(Certainty::Uncertain),
        })
        .take(k)
        .cloned()
        .collect();
    ContextVector {
        event: cv.event.clone(),
        entries,
    }
}

/// One row per entry: `event,label,rank,keyword,rank_weight`, ranks counted
/// from 0 within each (event, label) group.
pub fn context_vectors_csv(vectors: &[ContextVector]) -> String {
    let mut out = String::from("event,label,rank,keyword,rank_weight\n");
    for cv in vectors {
        for label in [Some(Certainty::Certain), Some(Certainty::Uncertain), None] {
            let name = match label {
                Some(Certainty::Certain) => "certain",
                Some(Certainty::Uncertain) => "uncertain",
                None => "",
            };
            for (rank, e) in cv.entries.iter().filter(|e| e.label == label).enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", cv.event, name, rank, e.keyword, e.ranked_weight);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::s4;

    fn s4_events(query: &str) -> (CooccurrenceIndex, EventSet) {
        let corpus = s4();
        let events = extract_events(query, &corpus, &IngestOptions::default());
        (CooccurrenceIndex::build(&corpus), events)
    }

    fn keywords(cv: &ContextVector) -> Vec<&str> {
        cv.entries.iter().map(|e| e.keyword.as_str()).collect()
    }

    #[test]
    fn events_from_query() {
        let corpus = crate::synthetic::corpus_from_tokens(&[&["medical", "care", "nurse"]]);
        let opts = IngestOptions::default();
        let events = extract_events("What has been published about medical care?", &corpus, &opts);
        assert_eq!(events.as_slice(), ["medical", "care"]);

        let s4 = s4();
        assert!(extract_events("zzz qqq", &s4, &opts).is_empty());
        assert_eq!(
            extract_events("virus virus panic", &s4, &opts).as_slice(),
            ["virus", "panic"]
        );
    }

    #[test]
    fn ulist_respects_guard() {
        let (idx, events) = s4_events("medical");
        let ulist = build_ulist(&idx, &events, CountMode::Raw).unwrap();
        let kws: Vec<_> = ulist.records.iter().map(|r| r.keyword.as_str()).collect();
        assert_eq!(kws, ["emergency", "lockdown", "virus"]);
        let virus = ulist.records.iter().find(|r| r.keyword == "virus").unwrap();
        assert!((virus.uncertainty - 2.6225562).abs() < 1e-6);

        let empty = build_ulist(&idx, &EventSet::default(), CountMode::Raw).unwrap();
        assert!(empty.records.is_empty());
    }

    #[test]
    fn rank_orders_ascending_with_keyword_ties() {
        let (idx, events) = s4_events("medical");
        let cvs = rank(build_ulist(&idx, &events, CountMode::Raw).unwrap());
        assert_eq!(cvs.len(), 1);
        // emergency and lockdown both weigh 2.1; virus weighs 2.92.
        assert_eq!(keywords(&cvs[0]), ["emergency", "lockdown", "virus"]);
        assert!((cvs[0].entries[0].ranked_weight - 2.1).abs() < 1e-12);
        assert!(rank(Ulist::default()).is_empty());
    }

    #[test]
    fn rank_keeps_event_order() {
        let (idx, events) = s4_events("panic medical");
        let cvs = rank(build_ulist(&idx, &events, CountMode::Raw).unwrap());
        let names: Vec<_> = cvs.iter().map(|c| c.event.as_str()).collect();
        assert_eq!(names, ["panic", "medical"]);
    }

    fn toy(weights: &[(&str, f64)]) -> ContextVector {
        ContextVector {
            event: "medical".into(),
            entries: weights
                .iter()
                .map(|(k, w)| ContextEntry {
                    keyword: k.to_string(),
                    entropy: 0.0,
                    info_gain: 1.0 - w,
                    uncertainty: *w,
                    ranked_weight: *w,
                    label: None,
                })
                .collect(),
        }
    }

    #[test]
    fn partition_labels_by_threshold() {
        let cv = partition_certainty(toy(&[("virus", 0.007), ("generally", 1.327)]), 1.0);
        let labels: Vec<_> = cv.entries.iter().map(|e| e.label.unwrap()).collect();
        assert_eq!(labels, [Certainty::Certain, Certainty::Uncertain]);

        let all = partition_certainty(toy(&[("a", 0.5), ("b", 7.0)]), 1e300);
        assert!(all.entries.iter().all(|e| e.label == Some(Certainty::Certain)));

        assert!(partition_certainty(toy(&[]), 1.0).entries.is_empty());
    }

    #[test]
    fn top_k_filters_and_truncates() {
        let cv = partition_certainty(toy(&[("a", 0.1), ("b", 0.2), ("c", 1.5), ("d", 1.6)]), 1.0);
        assert_eq!(keywords(&top_k(&cv, 10, LabelFilter::All)), ["a", "b", "c", "d"]);
        assert_eq!(keywords(&top_k(&cv, 1, LabelFilter::Certain)), ["a"]);
        assert_eq!(keywords(&top_k(&cv, 5, LabelFilter::Uncertain)), ["c", "d"]);

        let (idx, events) = s4_events("medical");
        let cvs = rank(build_ulist(&idx, &events, CountMode::Raw).unwrap());
        assert_eq!(keywords(&top_k(&cvs[0], 1, LabelFilter::All)), ["emergency"]);
    }

    #[test]
    fn csv_has_table_columns() {
        let cv = partition_certainty(toy(&[("virus", 0.007), ("generally", 1.327)]), 1.0);
        let csv = context_vectors_csv(&[cv]);
        assert_eq!(
            csv,
            "event,label,rank,keyword,rank_weight\nmedical,certain,0,virus,0.007\nmedical,uncertain,0,generally,1.327\n"
        );
    }
}
