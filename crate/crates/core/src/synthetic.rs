//! Small built-in corpora: the four-document reference fixture and a seeded
//! generator for vocabulary-disjoint planted topics.

use chrono::{Duration, NaiveDate};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Timestamp};

/// Raw CSV of the four-document fixture.
pub const S4_CSV: &str = include_str!("../fixtures/s4.csv");

const TOPICS: [[&str; 6]; 8] = [
    ["medical", "hospital", "nurse", "doctor", "clinic", "patient"],
    ["economy", "market", "stocks", "jobs", "bank", "prices"],
    ["school", "teacher", "students", "exam", "classes", "campus"],
    ["travel", "flight", "airport", "border", "hotel", "tourism"],
    ["sports", "league", "match", "stadium", "players", "season"],
    ["weather", "storm", "rain", "flood", "winds", "forecast"],
    ["music", "concert", "album", "singer", "tour", "band"],
    ["science", "research", "lab", "study", "journal", "data"],
];

fn minute(i: usize) -> Timestamp {
    let base = NaiveDate::from_ymd_opt(2020, 5, 2)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid base date");
    Timestamp::new(base + Duration::minutes(i as i64))
}

/// Builds a corpus directly from token lists, one document per minute.
pub fn corpus_from_tokens(docs: &[&[&str]]) -> Corpus {
    Corpus::from_documents(
        docs.iter()
            .enumerate()
            .map(|(i, tokens)| {
                Document::new(
                    format!("d{i}"),
                    minute(i),
                    tokens.iter().map(|t| t.to_string()).collect(),
                )
            })
            .collect(),
    )
}

/// The reference fixture:
/// `[medical virus emergency] [medical virus lockdown] [care panic] [virus panic]`.
pub fn s4() -> Corpus {
    let docs: [&[&str]; 4] = [
        &["medical", "virus", "emergency"],
        &["medical", "virus", "lockdown"],
        &["care", "panic"],
        &["virus", "panic"],
    ];
    // Ids and timestamps match the shipped CSV.
    Corpus::from_documents(
        docs.iter()
            .enumerate()
            .map(|(i, tokens)| {
                Document::new(
                    format!("s4-{}", i + 1),
                    minute(i + 3),
                    tokens.iter().map(|t| t.to_string()).collect(),
                )
            })
            .collect(),
    )
}

/// A corpus of `topics` vocabulary-disjoint themes with `docs_per_topic`
/// documents each, interleaved in time. Every document contains its topic's
/// anchor term plus three distinct other terms of that topic.
///
/// Returns the corpus and the anchor terms, which make natural events.
pub fn planted_topics(topics: usize, docs_per_topic: usize, seed: u64) -> (Corpus, Vec<String>) {
    assert!(topics <= TOPICS.len(), "at most {} planted topics", TOPICS.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut documents = Vec::with_capacity(topics * docs_per_topic);
    for n in 0..docs_per_topic {
        for (t, words) in TOPICS.iter().take(topics).enumerate() {
            let mut pool: Vec<&str> = words[1..].to_vec();
            let mut tokens = vec![words[0].to_string()];
            for _ in 0..3 {
                let pick = (rng.next_u64() % pool.len() as u64) as usize;
                tokens.push(pool.swap_remove(pick).to_string());
            }
            let i = n * topics + t;
            documents.push(Document::new(format!("t{t}-{n}"), minute(i), tokens));
        }
    }
    let events = TOPICS.iter().take(topics).map(|w| w[0].to_string()).collect();
    (Corpus::from_documents(documents), events)
}
