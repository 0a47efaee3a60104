//! Text normalization: lowercasing, URL/mention/hashtag removal, punctuation
//! stripping and stopword filtering.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// A set of terms dropped during tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    terms: BTreeSet<String>,
}

impl StopwordList {
    /// The shipped English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn empty() -> Self {
        Self { terms: BTreeSet::new() }
    }

    /// Parses one term per line; blank lines and `#` comments are skipped.
    /// Terms are lowercased so the list matches normalized tokens.
    pub fn parse(text: &str) -> Self {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { terms }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::english()
    }
}

/// Settings shared by ingestion and query tokenization.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub stopwords: StopwordList,
    /// Tokens with fewer characters than this are dropped.
    pub min_token_len: usize,
    /// Skip malformed rows (and count them) instead of failing.
    pub lenient: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            stopwords: StopwordList::english(),
            min_token_len: 2,
            lenient: false,
        }
    }
}

fn is_link(raw: &str) -> bool {
    let lower = raw.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Turns raw text into an ordered list of normalized terms.
///
/// Whitespace-separated pieces that look like URLs, `@mentions` or `#hashtags`
/// are removed whole. Every other piece is lowercased and reduced to its
/// alphanumeric characters; the result is kept unless it is shorter than
/// `min_token_len` or is a stopword.
pub fn normalize_tokenize(text: &str, options: &IngestOptions) -> Vec<String> {
    text.split_whitespace()
        .filter(|raw| !(raw.starts_with('@') || raw.starts_with('#') || is_link(raw)))
        .filter_map(|raw| {
            let token: String = raw.to_lowercase().chars().filter(|c| c.is_alphanumeric()).collect();
            let long_enough = token.chars().count() >= options.min_token_len.max(1);
            (long_enough && !options.stopwords.contains(&token)).then_some(token)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(text: &str) -> Vec<String> {
        normalize_tokenize(text, &IngestOptions::default())
    }

    #[test]
    fn strips_links_mentions_hashtags_and_punctuation() {
        assert_eq!(tok("Medical CARE!! http://x.co #covid @who"), ["medical", "care"]);
    }

    #[test]
    fn drops_stopwords_and_short_tokens() {
        assert!(tok("a I to").is_empty());
    }

    #[test]
    fn query_from_result_discussion() {
        assert_eq!(
            tok("What has been published about medical care?"),
            ["published", "medical", "care"]
        );
    }

    #[test]
    fn apostrophes_collapse_before_stopword_check() {
        assert_eq!(tok("don't panic, it's fine"), ["panic", "fine"]);
    }

    #[test]
    fn min_len_counts_characters_not_bytes() {
        let opts = IngestOptions {
            min_token_len: 3,
            ..Default::default()
        };
        assert_eq!(normalize_tokenize("éé ééé", &opts), ["ééé"]);
    }

    #[test]
    fn stopword_file_comments_are_ignored() {
        let list = StopwordList::parse("# header\nFoo\n\n  bar \n");
        assert_eq!(list.len(), 2);
        assert!(list.contains("foo"));
        assert!(list.contains("bar"));
        assert!(!list.contains("# header"));
    }

    #[test]
    fn empty_input_is_total() {
        assert!(tok("").is_empty());
        assert!(tok("   \t\n").is_empty());
        assert!(tok("!!! ??? ...").is_empty());
    }
}
