//! Shared workloads for the criterion benchmarks in `benches/`.

use thematic_core::synthetic::planted_topics;
use thematic_core::{extract_events, Corpus, EventSet, IngestOptions};

/// A planted five-topic corpus and its anchor events.
pub fn workload(docs_per_topic: usize) -> (Corpus, EventSet) {
    let (corpus, anchors) = planted_topics(5, docs_per_topic, 1);
    let events = extract_events(&anchors.join(" "), &corpus, &IngestOptions::default());
    (corpus, events)
}
