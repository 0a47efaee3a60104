use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{sparse_dist, DocVector, SparsePoints};
use crate::error::{Error, Result};

/// Mean silhouette coefficient under the Euclidean metric. Points alone in
/// their cluster score 0.
pub fn silhouette(vectors: &[DocVector], assignments: &[usize]) -> Result<f64> {
    if vectors.len() != assignments.len() {
        return Err(Error::LengthMismatch {
            vectors: vectors.len(),
            assignments: assignments.len(),
        });
    }
    // Compact arbitrary cluster ids to 0..m.
    let ids: BTreeMap<usize, usize> = assignments
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    if ids.len() < 2 {
        return Err(Error::SingleCluster);
    }
    let labels: Vec<usize> = assignments.iter().map(|a| ids[a]).collect();
    let mut sizes = vec![0usize; ids.len()];
    for &l in &labels {
        sizes[l] += 1;
    }
    let points = SparsePoints::from_vectors(vectors);

    let scores: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let own = labels[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; sizes.len()];
            for (j, row) in points.rows.iter().enumerate() {
                if j != i {
                    sums[labels[j]] += sparse_dist(&points.rows[i], row);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..sizes.len())
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let scale = a.max(b);
            if scale > 0.0 {
                (b - a) / scale
            } else {
                0.0
            }
        })
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
