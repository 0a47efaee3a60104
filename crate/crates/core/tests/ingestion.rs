use std::io::Write;
use std::path::PathBuf;

use proptest::prelude::*;
use thematic_core::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn fixture_files_produce_the_reference_corpus() {
    let opts = IngestOptions::default();
    let from_csv = ingest(fixture("s4.csv"), Format::Csv, &opts).unwrap();
    let from_jsonl = ingest(fixture("s4.jsonl"), Format::JsonLines, &opts).unwrap();
    assert_eq!(from_csv, synthetic::s4());
    assert_eq!(from_jsonl, synthetic::s4());
    let stats = corpus_stats(&from_csv);
    assert_eq!((stats.documents, stats.vocabulary, stats.tokens), (4, 6, 10));
}

#[test]
fn ingesting_twice_is_identical() {
    let opts = IngestOptions::default();
    let a = ingest(fixture("s4.csv"), Format::Csv, &opts).unwrap();
    let b = ingest(fixture("s4.csv"), Format::Csv, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(to_sorted_json(&a), to_sorted_json(&b));
}

#[test]
fn custom_stopword_file_replaces_the_default() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# project stopwords\nvirus\npanic").unwrap();
    let opts = IngestOptions {
        stopwords: StopwordList::from_file(file.path()).unwrap(),
        ..Default::default()
    };
    let corpus = ingest(fixture("s4.csv"), Format::Csv, &opts).unwrap();
    assert!(corpus.term_stats("virus").is_none());
    // "the" is no longer filtered without the default list.
    assert!(corpus.term_stats("the").is_some());
}

#[test]
fn unsorted_input_is_ordered_by_timestamp() {
    let mut file = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
    write!(
        file,
        "id,timestamp,text\nb,2020-05-02 00:59,later tweet\na,2020-05-02 00:03,earlier tweet\n"
    )
    .unwrap();
    let path = file.path().to_path_buf();
    let corpus = ingest(&path, Format::from_path(&path), &IngestOptions::default()).unwrap();
    let ids: Vec<_> = corpus.documents().iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["a", "b"]);
}

fn doc_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    let term = prop::sample::select(vec!["flu", "virus", "mask", "care", "ward"]).prop_map(String::from);
    prop::collection::vec(prop::collection::vec(term, 0..6), 0..10)
}

proptest! {
    #[test]
    fn tokenizer_is_idempotent(text in "\\PC{0,80}") {
        let opts = IngestOptions::default();
        let once = normalize_tokenize(&text, &opts);
        let twice = normalize_tokenize(&once.join(" "), &opts);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn tokens_are_clean(text in "[a-zA-Z@#:/. !?,']{0,60}") {
        let opts = IngestOptions::default();
        for t in normalize_tokenize(&text, &opts) {
            prop_assert!(t.chars().count() >= 2);
            prop_assert!(t.chars().all(char::is_alphanumeric));
            prop_assert!(!opts.stopwords.contains(&t));
        }
    }

    #[test]
    fn series_agree_with_corpus_totals(docs in doc_strategy(), event in "flu|virus|zebra") {
        let refs: Vec<Vec<&str>> = docs.iter().map(|d| d.iter().map(String::as_str).collect()).collect();
        let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
        let corpus = synthetic::corpus_from_tokens(&slices);

        let lengths = tweet_length_series(&corpus);
        let sum: f64 = lengths.iter().map(|p| p.value).sum();
        prop_assert_eq!(sum as u64, corpus.total_token_count());
        let vocab_total: u64 = corpus.vocabulary().values().map(|s| s.count).sum();
        prop_assert_eq!(vocab_total, corpus.total_token_count());
        prop_assert!(corpus.vocabulary().values().all(|s| s.doc_freq as usize <= corpus.len()));

        let occurrences = event_occurrence_series(&corpus, &event);
        prop_assert_eq!(occurrences.len(), corpus.len());
        for (p, d) in occurrences.iter().zip(corpus.documents()) {
            prop_assert_eq!(p.value == 1.0, d.tokens.contains(&event));
            prop_assert!(p.value == 0.0 || p.value == 1.0);
        }
        prop_assert!(lengths.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }
}
