//! Document embeddings and K-means based evaluation of them.

mod compare;
mod kmeans;
mod silhouette;
mod vectorize;

pub use compare::{compare_methods, CompareOptions, ComparisonReport, Deltas, KPolicy, SchemeReport};
pub use kmeans::{elbow_select, inertia_curve, kmeans, ClusteringResult, KMeansParams};
pub use silhouette::silhouette;
pub use vectorize::{drop_empty, vectorize, DocVector, Scheme};

/// Documents as sparse rows over a shared, lexicographically ordered term space.
#[derive(Debug, Clone)]
pub(crate) struct SparsePoints {
    pub terms: Vec<String>,
    /// Each row is sorted by dimension and holds no zero weights.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparsePoints {
    pub fn from_vectors(vectors: &[DocVector]) -> Self {
        let mut terms: Vec<String> = vectors.iter().flat_map(|v| v.components.keys().cloned()).collect();
        terms.sort_unstable();
        terms.dedup();
        let rows = vectors
            .iter()
            .map(|v| {
                v.components
                    .iter()
                    .map(|(t, w)| {
                        let dim = terms.binary_search(t).expect("term collected above");
                        (dim, *w)
                    })
                    .collect()
            })
            .collect();
        Self { terms, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn dims(&self) -> usize {
        self.terms.len()
    }
}

/// Squared Euclidean distance between a sparse row and a dense centroid whose
/// squared norm is `centroid_norm`.
pub(crate) fn sq_dist_to_dense(row: &[(usize, f64)], centroid: &[f64], centroid_norm: f64) -> f64 {
    let correction: f64 = row
        .iter()
        .map(|&(d, x)| {
            let c = centroid[d];
            (x - c) * (x - c) - c * c
        })
        .sum();
    (centroid_norm + correction).max(0.0)
}

/// Euclidean distance between two sparse rows.
pub(crate) fn sparse_dist(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    use std::cmp::Ordering;
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    loop {
        let diff = match (a.get(i), b.get(j)) {
            (Some(&(da, xa)), Some(&(db, xb))) => match da.cmp(&db) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    xa - xb
                }
                Ordering::Less => {
                    i += 1;
                    xa
                }
                Ordering::Greater => {
                    j += 1;
                    xb
                }
            },
            (Some(&(_, xa)), None) => {
                i += 1;
                xa
            }
            (None, Some(&(_, xb))) => {
                j += 1;
                xb
            }
            (None, None) => break,
        };
        acc += diff * diff;
    }
    acc.sqrt()
}
