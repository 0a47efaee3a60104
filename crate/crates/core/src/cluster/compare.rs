use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::kmeans::{check_input, elbow_select, inertia_curve, kmeans, KMeansParams};
use super::silhouette::silhouette;
use super::vectorize::{drop_empty, vectorize, Scheme};
use crate::cooccur::{CooccurrenceIndex, CountMode};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::rank::{build_ulist, rank, EventSet};

/// How the number of clusters is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KPolicy {
    Fixed(usize),
    /// Elbow of the inertia curve over `1..=k_max` (capped at the number of
    /// documents).
    Elbow {
        k_max: usize,
    },
}

impl Default for KPolicy {
    fn default() -> Self {
        KPolicy::Elbow { k_max: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareOptions {
    pub schemes: Vec<Scheme>,
    pub k_policy: KPolicy,
    pub kmeans: KMeansParams,
    pub count_mode: CountMode,
}

impl CompareOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            schemes: Scheme::ALL.to_vec(),
            k_policy: KPolicy::default(),
            kmeans: KMeansParams::with_seed(seed),
            count_mode: CountMode::Raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeReport {
    pub k: usize,
    pub inertia_curve: Vec<(usize, f64)>,
    pub silhouette: f64,
    pub skipped_docs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deltas {
    pub thematic_minus_tf: Option<f64>,
    pub thematic_minus_tfidf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schemes: BTreeMap<Scheme, SchemeReport>,
    /// Absolute silhouette differences.
    pub deltas: Deltas,
    /// Differences relative to the baseline's magnitude.
    pub relative_deltas: Deltas,
    pub seed: u64,
    pub config_digest: String,
}

impl ComparisonReport {
    /// Pretty JSON with lexicographically sorted keys.
    pub fn to_json(&self) -> String {
        crate::to_sorted_json(self)
    }
}

fn digest(events: &EventSet, options: &CompareOptions) -> String {
    let canonical = crate::to_sorted_json(&serde_json::json!({
        "events": events.as_slice(),
        "options": options,
    }));
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn evaluate(
    corpus: &Corpus,
    scheme: Scheme,
    context: &[crate::rank::ContextVector],
    options: &CompareOptions,
) -> Result<SchemeReport> {
    let vectors = vectorize(corpus, scheme, Some(context))?;
    let (vectors, skipped_docs) = drop_empty(vectors);
    let params = &options.kmeans;
    let (k, inertia_curve) = match options.k_policy {
        KPolicy::Fixed(k) => {
            let result = kmeans(&vectors, k, params)?;
            (k, vec![(k, result.inertia)])
        }
        KPolicy::Elbow { k_max } => {
            let k_max = k_max.min(vectors.len());
            check_input(&vectors, k_max)?;
            let curve = inertia_curve(&vectors, k_max, params)?;
            (elbow_select(&curve)?, curve)
        }
    };
    let result = kmeans(&vectors, k, params)?;
    Ok(SchemeReport {
        k,
        inertia_curve,
        silhouette: silhouette(&vectors, &result.assignments)?,
        skipped_docs,
    })
}

/// Clusters the corpus under each requested weighting and reports silhouettes
/// alongside the differences between the thematic scheme and the baselines.
pub fn compare_methods(corpus: &Corpus, events: &EventSet, options: &CompareOptions) -> Result<ComparisonReport> {
    let context = if options.schemes.contains(&Scheme::Thematic) {
        let index = CooccurrenceIndex::build(corpus);
        rank(build_ulist(&index, events, options.count_mode)?)
    } else {
        Vec::new()
    };

    let mut schemes = BTreeMap::new();
    for &scheme in &options.schemes {
        schemes.insert(scheme, evaluate(corpus, scheme, &context, options)?);
    }

    let silhouette_of = |s: Scheme| schemes.get(&s).map(|r: &SchemeReport| r.silhouette);
    let thematic = silhouette_of(Scheme::Thematic);
    let absolute = |base: Option<f64>| Some(thematic? - base?);
    let relative = |base: Option<f64>| -> Option<f64> {
        let (thematic, base) = (thematic?, base?);
        (base != 0.0).then(|| (thematic - base) / base.abs())
    };
    let (tf, tfidf) = (silhouette_of(Scheme::Tf), silhouette_of(Scheme::Tfidf));

    Ok(ComparisonReport {
        deltas: Deltas {
            thematic_minus_tf: absolute(tf),
            thematic_minus_tfidf: absolute(tfidf),
        },
        relative_deltas: Deltas {
            thematic_minus_tf: relative(tf),
            thematic_minus_tfidf: relative(tfidf),
        },
        seed: options.kmeans.seed,
        config_digest: digest(events, options),
        schemes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::extract_events;
    use crate::synthetic::s4;
    use crate::text::IngestOptions;

    fn s4_report(seed: u64) -> ComparisonReport {
        let corpus = s4();
        let events = extract_events("medical care", &corpus, &IngestOptions::default());
        compare_methods(&corpus, &events, &CompareOptions::new(seed)).unwrap()
    }

    #[test]
    fn s4_comparison_covers_all_schemes() {
        let report = s4_report(7);
        assert_eq!(report.schemes.len(), 3);
        for r in report.schemes.values() {
            assert!((-1.0..=1.0).contains(&r.silhouette));
            assert_eq!(r.inertia_curve.len(), 4);
            assert_eq!(r.skipped_docs, 0);
        }
        assert!(report.deltas.thematic_minus_tf.is_some());
    }

    #[test]
    fn report_is_deterministic() {
        assert_eq!(s4_report(7).to_json(), s4_report(7).to_json());
    }

    #[test]
    fn json_keys_are_sorted() {
        let json = s4_report(1).to_json();
        let pos = |k: &str| json.find(k).unwrap();
        assert!(pos("\"config_digest\"") < pos("\"deltas\""));
        assert!(pos("\"deltas\"") < pos("\"relative_deltas\""));
        assert!(pos("\"relative_deltas\"") < pos("\"schemes\""));
        assert!(pos("\"inertia_curve\"") < pos("\"silhouette\""));
    }

    #[test]
    fn baselines_only_leave_deltas_empty() {
        let corpus = s4();
        let mut options = CompareOptions::new(0);
        options.schemes = vec![Scheme::Tf, Scheme::Tfidf];
        options.k_policy = KPolicy::Fixed(2);
        let report = compare_methods(&corpus, &EventSet::default(), &options).unwrap();
        assert_eq!(report.deltas.thematic_minus_tf, None);
        assert_eq!(report.schemes[&Scheme::Tf].k, 2);
    }
}
