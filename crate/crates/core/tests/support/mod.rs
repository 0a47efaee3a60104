//! Test-only helpers: a direct-from-definition formula oracle that reads raw
//! token lists (never the index), and a tiny seeded generator.
#![allow(dead_code)]

pub type Docs = Vec<Vec<String>>;

pub fn docs(raw: &[&[&str]]) -> Docs {
    raw.iter().map(|d| d.iter().map(|t| t.to_string()).collect()).collect()
}

fn has(doc: &[String], term: &str) -> bool {
    doc.iter().any(|t| t == term)
}

pub fn p_doc(docs: &Docs, term: &str) -> f64 {
    docs.iter().filter(|d| has(d, term)).count() as f64 / docs.len() as f64
}

pub fn p_cond(docs: &Docs, keyword: &str, event: &str) -> f64 {
    let with_event: Vec<_> = docs.iter().filter(|d| has(d, event)).collect();
    with_event.iter().filter(|d| has(d, keyword)).count() as f64 / with_event.len() as f64
}

/// p·log2(1/p) with 0 at p = 0.
fn inv_log_term(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (1.0 / p).log2()
    }
}

/// p·log2(p) with 0 at p = 0.
fn log_term(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

pub fn entropy(docs: &Docs, keyword: &str, event: &str) -> f64 {
    let pj = p_doc(docs, event);
    let pi = p_doc(docs, keyword);
    let pij = p_cond(docs, keyword, event);
    -(inv_log_term(pj) + inv_log_term(pi) + log_term(pij))
}

pub fn event_count(docs: &Docs, event: &str, normalized: bool) -> f64 {
    let c = docs.iter().filter(|d| has(d, event)).count() as f64;
    if normalized {
        c / docs.len() as f64
    } else {
        c
    }
}

pub fn info_gain(docs: &Docs, keyword: &str, event: &str, normalized: bool) -> f64 {
    event_count(docs, event, normalized) * entropy(docs, keyword, event)
}

pub fn uncertainty(docs: &Docs, keyword: &str, event: &str, normalized: bool) -> f64 {
    1.0 - info_gain(docs, keyword, event, normalized)
}

pub fn ranked_weight(docs: &Docs, keyword: &str, event: &str, normalized: bool) -> f64 {
    let count = docs.iter().flatten().filter(|t| *t == keyword).count() as f64;
    let total = docs.iter().map(Vec::len).sum::<usize>() as f64;
    uncertainty(docs, keyword, event, normalized) + count / total
}

/// Cosine of the binary document-incidence vectors of two terms.
pub fn incidence_cosine(docs: &Docs, a: &str, b: &str) -> f64 {
    let va: Vec<f64> = docs.iter().map(|d| has(d, a) as u8 as f64).collect();
    let vb: Vec<f64> = docs.iter().map(|d| has(d, b) as u8 as f64).collect();
    let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
    let na: f64 = va.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// SplitMix64, for reproducible random corpora in tests.
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

pub const TERMS: [&str; 6] = ["ta", "tb", "tc", "td", "te", "tf"];

/// 1..=max_docs documents, each holding 1..=4 tokens (repeats allowed) drawn
/// from the first `terms` entries of [`TERMS`].
pub fn random_docs(rng: &mut SplitMix, max_docs: usize, terms: usize) -> Docs {
    let n = 1 + rng.below(max_docs);
    (0..n)
        .map(|_| {
            let len = 1 + rng.below(4);
            (0..len).map(|_| TERMS[rng.below(terms)].to_string()).collect()
        })
        .collect()
}

pub fn to_corpus(docs: &Docs) -> thematic_core::Corpus {
    let refs: Vec<Vec<&str>> = docs.iter().map(|d| d.iter().map(String::as_str).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    thematic_core::synthetic::corpus_from_tokens(&slices)
}

/// Every corpus of 1..=max_docs documents where each document is a
/// subset of `terms` (possibly empty).
pub fn all_subset_corpora(terms: &[&str], max_docs: usize) -> Vec<Docs> {
    let subsets: Vec<Vec<String>> = (0..(1u32 << terms.len()))
        .map(|mask| {
            terms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.to_string())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut frontier: Vec<Docs> = vec![Vec::new()];
    for _ in 0..max_docs {
        let mut next = Vec::new();
        for corpus in &frontier {
            for s in &subsets {
                let mut c = corpus.clone();
                c.push(s.clone());
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
