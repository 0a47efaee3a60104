//! Seeded Lloyd's K-means with best-of-restarts and elbow selection.
//!
//! Initial centroids are k distinct input points chosen by greedy k-means++
//! (D²) sampling. Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`,
//! stream `r` for restart `r`; a uniform draw is the top 53 bits of
//! `next_u64()` scaled into [0, 1).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{sq_dist_to_dense, DocVector, SparsePoints};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KMeansParams {
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 100,
            restarts: 8,
        }
    }
}

impl KMeansParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub k: usize,
    pub doc_ids: Vec<String>,
    /// Cluster id in `0..k` for each input vector.
    pub assignments: Vec<usize>,
    /// Dimension labels of the centroid vectors.
    pub terms: Vec<String>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub seed: u64,
    /// Lloyd iterations of the winning restart.
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn densify(row: &[(usize, f64)], dims: usize) -> Vec<f64> {
    let mut dense = vec![0.0; dims];
    for &(d, x) in row {
        dense[d] = x;
    }
    dense
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Draws one index with probability proportional to `weights`, which must
/// have a positive sum.
fn weighted_pick(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let target = uniform(rng) * total;
    let mut acc = 0.0;
    let mut pick = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
    }
    pick.expect("positive total implies a positive weight")
}

/// Greedy D² seeding: each step draws `2 + ln k` candidates proportionally to
/// their squared distance from the chosen set and keeps the one leaving the
/// smallest total. Chosen indices are always distinct.
fn init_centroids(points: &SparsePoints, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let distances_to = |i: usize| -> Vec<f64> {
        let centroid = densify(&points.rows[i], points.dims());
        let norm = norm2(&centroid);
        points
            .rows
            .iter()
            .enumerate()
            .map(|(j, row)| {
                if j == i {
                    0.0
                } else {
                    sq_dist_to_dense(row, &centroid, norm)
                }
            })
            .collect()
    };

    let first = ((uniform(rng) * n as f64) as usize).min(n - 1);
    let mut chosen = vec![first];
    let mut nearest = distances_to(first);

    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        if total > 0.0 {
            let mut best: Option<(usize, f64, Vec<f64>)> = None;
            for _ in 0..trials {
                let cand = weighted_pick(&nearest, total, rng);
                let merged: Vec<f64> = nearest.iter().zip(distances_to(cand)).map(|(a, b)| a.min(b)).collect();
                let potential: f64 = merged.iter().sum();
                if best.as_ref().is_none_or(|b| potential < b.1) {
                    best = Some((cand, potential, merged));
                }
            }
            let (cand, _, merged) = best.expect("at least one trial");
            chosen.push(cand);
            nearest = merged;
        } else {
            // Every remaining point coincides with a chosen one.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            chosen.push(free[((uniform(rng) * free.len() as f64) as usize).min(free.len() - 1)]);
        }
    }
    chosen
        .into_iter()
        .map(|i| densify(&points.rows[i], points.dims()))
        .collect()
}

/// Nearest centroid (lowest index on ties) and its squared distance.
fn assign(points: &SparsePoints, centroids: &[Vec<f64>]) -> Vec<(usize, f64)> {
    let norms: Vec<f64> = centroids.iter().map(|c| norm2(c)).collect();
    points
        .rows
        .par_iter()
        .map(|row| {
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist_to_dense(row, centroid, norms[c]);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .collect()
}

/// Means of the assigned points, accumulated in index order. Empty clusters
/// keep their previous centroid.
fn update(points: &SparsePoints, assignments: &[usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    let mut sums = vec![vec![0.0; points.dims()]; k];
    let mut sizes = vec![0usize; k];
    for (row, &c) in points.rows.iter().zip(assignments) {
        sizes[c] += 1;
        for &(d, x) in row {
            sums[c][d] += x;
        }
    }
    for c in 0..k {
        if sizes[c] > 0 {
            let n = sizes[c] as f64;
            centroids[c] = sums[c].iter().map(|s| s / n).collect();
        }
    }
}

fn inertia_of(points: &SparsePoints, assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    let norms: Vec<f64> = centroids.iter().map(|c| norm2(c)).collect();
    points
        .rows
        .iter()
        .zip(assignments)
        .map(|(row, &c)| sq_dist_to_dense(row, &centroids[c], norms[c]))
        .sum()
}

struct Run {
    assignments: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    inertia: f64,
    iterations: usize,
}

fn lloyd(points: &SparsePoints, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> Run {
    let mut centroids = init_centroids(points, k, rng);
    let mut assignments: Vec<usize> = Vec::new();
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        iterations += 1;
        let nearest = assign(points, &centroids);
        let inertia: f64 = nearest.iter().map(|(_, d)| d).sum();
        assert!(
            inertia <= previous + 1e-9 * previous.abs().max(1.0),
            "inertia rose from {previous} to {inertia} in iteration {iterations}"
        );
        previous = inertia;
        let next: Vec<usize> = nearest.into_iter().map(|(c, _)| c).collect();
        if next == assignments {
            break;
        }
        assignments = next;
        update(points, &assignments, &mut centroids);
    }
    let inertia = inertia_of(points, &assignments, &centroids);
    Run {
        assignments,
        centroids,
        inertia,
        iterations,
    }
}

pub(crate) fn check_input(vectors: &[DocVector], k: usize) -> Result<()> {
    if k == 0 || k > vectors.len() {
        return Err(Error::KOutOfRange { k, n: vectors.len() });
    }
    if vectors.iter().all(DocVector::is_empty) {
        return Err(Error::AllEmpty);
    }
    Ok(())
}

/// Clusters `vectors` into `k` groups, keeping the lowest-inertia restart
/// (earliest on ties). Deterministic for a given `params`.
pub fn kmeans(vectors: &[DocVector], k: usize, params: &KMeansParams) -> Result<ClusteringResult> {
    check_input(vectors, k)?;
    let points = SparsePoints::from_vectors(vectors);
    let runs: Vec<Run> = (0..params.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(r);
            lloyd(&points, k, params.max_iter, &mut rng)
        })
        .collect();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cand| if cand.1.inertia < best.1.inertia { cand } else { best })
        .expect("at least one restart");
    Ok(ClusteringResult {
        k,
        doc_ids: vectors.iter().map(|v| v.doc_id.clone()).collect(),
        assignments: best.assignments,
        terms: points.terms,
        centroids: best.centroids,
        inertia: best.inertia,
        seed: params.seed,
        iterations: best.iterations,
        restart,
    })
}

/// Best inertia for each k in `1..=k_max`.
pub fn inertia_curve(vectors: &[DocVector], k_max: usize, params: &KMeansParams) -> Result<Vec<(usize, f64)>> {
    check_input(vectors, k_max)?;
    (1..=k_max)
        .map(|k| kmeans(vectors, k, params).map(|r| (k, r.inertia)))
        .collect()
}

/// The k with the largest discrete second difference of the curve; ties go to
/// the smaller k.
pub fn elbow_select(curve: &[(usize, f64)]) -> Result<usize> {
    if curve.len() < 3 {
        return Err(Error::CurveTooShort(curve.len()));
    }
    let mut best = (curve[1].0, f64::NEG_INFINITY);
    for w in curve.windows(3) {
        let second = w[0].1 - 2.0 * w[1].1 + w[2].1;
        if second > best.1 {
            best = (w[1].0, second);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn points(coords: &[(f64, f64)]) -> Vec<DocVector> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| DocVector::new(format!("p{i}"), [("x".to_string(), x), ("y".to_string(), y)]))
            .collect()
    }

    #[test]
    fn two_blob_fixture() {
        let vs = points(&[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (10.0, 1.0)]);
        let r = kmeans(&vs, 2, &KMeansParams::with_seed(3)).unwrap();
        assert!((r.inertia - 1.0).abs() < 1e-9);
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
    }

    #[test]
    fn k_equals_n_is_zero_inertia() {
        let vs = points(&[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (3.0, 1.0), (2.0, 2.0)]);
        assert_eq!(kmeans(&vs, 5, &KMeansParams::default()).unwrap().inertia, 0.0);
    }

    #[test]
    fn k_one_is_total_deviation() {
        let vs = points(&[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (10.0, 1.0)]);
        // mean (5, 0.5): each point contributes 25 + 0.25
        let r = kmeans(&vs, 1, &KMeansParams::default()).unwrap();
        assert!((r.inertia - 101.0).abs() < 1e-9);
    }

    #[test]
    fn duplicate_points_still_get_distinct_seeds() {
        let vs = points(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]);
        let r = kmeans(&vs, 3, &KMeansParams::default()).unwrap();
        assert_eq!(r.inertia, 0.0);
        let curve = inertia_curve(&vs, 3, &KMeansParams::default()).unwrap();
        assert!(curve.iter().all(|&(_, i)| i == 0.0));
    }

    #[test]
    fn input_validation() {
        let vs = points(&[(1.0, 0.0), (0.0, 1.0)]);
        assert!(matches!(
            kmeans(&vs, 0, &KMeansParams::default()),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            kmeans(&vs, 3, &KMeansParams::default()),
            Err(Error::KOutOfRange { .. })
        ));
        let empty = vec![DocVector::new("a", []), DocVector::new("b", [])];
        assert!(matches!(
            kmeans(&empty, 1, &KMeansParams::default()),
            Err(Error::AllEmpty)
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let vs = points(&[(0.0, 0.0), (1.0, 1.0), (5.0, 5.0), (6.0, 5.0), (9.0, 0.0), (9.0, 1.0)]);
        let p = KMeansParams::with_seed(42);
        assert_eq!(kmeans(&vs, 3, &p).unwrap(), kmeans(&vs, 3, &p).unwrap());
    }

    #[test]
    fn elbow_rules() {
        let linear: Vec<(usize, f64)> = (1..=6).map(|k| (k, 60.0 - 10.0 * k as f64)).collect();
        assert_eq!(elbow_select(&linear).unwrap(), 2);
        let bent = [(1, 100.0), (2, 60.0), (3, 20.0), (4, 18.0), (5, 17.0)];
        assert_eq!(elbow_select(&bent).unwrap(), 3);
        assert!(matches!(elbow_select(&bent[..2]), Err(Error::CurveTooShort(2))));
    }
}
