//! Spectral clustering: generalized eigenvector coordinates, k-means on
//! those coordinates, and the adjusted Rand index for comparing partitions.

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eigen::generalized_eig;
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::laplacian::{degree_vector, laplacian};

/// Lloyd iterations are capped here; k-means on a handful of spectral
/// coordinates converges in far fewer.
const MAX_KMEANS_ITERS: usize = 300;
/// Column norms below this are left unnormalized and reported.
const ZERO_COLUMN_TOL: f64 = 1e-12;

/// Per-sample coordinates used for clustering: row u of `coords` is
/// generalized eigenvector w_{u+1}, and each column (one sample's K-vector)
/// is scaled to unit length.
///
/// `zero_columns` lists the 1-based samples whose coordinate vector had
/// norm below 1e-12 and was left as computed; with the constant first
/// eigenvector present this stays empty on any valid graph.
#[derive(Debug, Clone)]
pub struct SpectralCoordinates {
    pub coords: Array2<f64>,
    pub zero_columns: Vec<usize>,
}

impl SpectralCoordinates {
    pub fn n_samples(&self) -> usize {
        self.coords.ncols()
    }

    pub fn dimension(&self) -> usize {
        self.coords.nrows()
    }

    /// Samples as rows (N x K), the layout k-means consumes.
    pub fn samples(&self) -> Array2<f64> {
        self.coords.t().to_owned()
    }
}

/// Computes the K-dimensional spectral coordinates of every node.
///
/// Unlike an eigenmap this keeps the constant eigenvector: on a graph with
/// several components the leading K vectors are constant per component,
/// which is exactly what separates the clusters. The graph may therefore
/// be disconnected. Requires 1 <= k <= N.
pub fn spectral_coordinates(g: &SimilarityGraph, k: usize) -> Result<SpectralCoordinates> {
    let n = g.n_nodes();
    if k == 0 || k > n {
        return Err(Error::InvalidRecipe(format!(
            "cluster count must satisfy 1 <= k <= N, got k = {k} with N = {n}"
        )));
    }
    let spectrum = generalized_eig(&laplacian(g), &degree_vector(g))?;
    let mut coords = Array2::zeros((k, n));
    for u in 0..k {
        for j in 0..n {
            coords[[u, j]] = spectrum.eigenvectors[[j, u]];
        }
    }
    let mut zero_columns = Vec::new();
    for j in 0..n {
        let norm = coords.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= ZERO_COLUMN_TOL {
            zero_columns.push(j + 1);
        } else {
            for u in 0..k {
                coords[[u, j]] /= norm;
            }
        }
    }
    Ok(SpectralCoordinates {
        coords,
        zero_columns,
    })
}

/// Result of a k-means run. Labels are 1-based cluster ids in 1..=k,
/// centroids are rows of a k x m matrix, and inertia is the sum of squared
/// distances from each sample to its assigned centroid.
#[derive(Debug, Clone)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
}

fn nearest_centroid(point: ArrayView1<f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let d = sq_dist(point, row);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    (best, best_d)
}

/// Chooses k initial centroids by distance-squared weighted sampling: the
/// first uniformly, each next one with probability proportional to its
/// squared distance from the nearest centroid chosen so far.
fn seed_centroids(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = points.nrows();
    let m = points.ncols();
    let mut centroids = Array2::zeros((k, m));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));

    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), centroids.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                cum += w;
                if cum > r {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // all remaining points coincide with chosen centroids; any
            // deterministic choice works
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&points.row(chosen));
        for (row, best) in points.rows().into_iter().zip(d2.iter_mut()) {
            let d = sq_dist(row, centroids.row(c));
            if d < *best {
                *best = d;
            }
        }
    }
    centroids
}

/// Lloyd iteration from explicit starting centroids. Ties in the
/// assignment step go to the lower-index centroid; a centroid that ends an
/// iteration with no samples is restarted at the point farthest from its
/// assigned centroid.
fn lloyd(
    points: &Array2<f64>,
    mut centroids: Array2<f64>,
) -> (ClusterAssignment, Vec<f64>) {
    let n = points.nrows();
    let k = centroids.nrows();
    let m = points.ncols();
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut inertia = 0.0;

    for iter in 0..MAX_KMEANS_ITERS {
        // assignment
        let mut changed = iter == 0;
        inertia = 0.0;
        for (row, label) in points.rows().into_iter().zip(labels.iter_mut()) {
            let (c, d) = nearest_centroid(row, &centroids);
            if *label != c {
                changed = true;
                *label = c;
            }
            inertia += d;
        }
        trace.push(inertia);
        iterations = iter + 1;
        if !changed {
            break;
        }

        // update
        let mut sums = Array2::<f64>::zeros((k, m));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            let mut row = sums.row_mut(labels[i]);
            row += &points.row(i);
        }
        for ((mut row, sum), &count) in centroids.rows_mut().into_iter().zip(sums.rows()).zip(&counts) {
            if count > 0 {
                row.assign(&sum);
                row /= count as f64;
            }
        }
        // restart empty clusters at the farthest point
        for (c, &count) in counts.iter().enumerate() {
            if count == 0 {
                let mut far = 0usize;
                let mut far_d = -1.0;
                for (i, (row, &label)) in points.rows().into_iter().zip(&labels).enumerate() {
                    let d = sq_dist(row, centroids.row(label));
                    if d > far_d {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.row_mut(c).assign(&points.row(far));
            }
        }
    }

    let assignment = ClusterAssignment {
        labels: labels.iter().map(|&c| c + 1).collect(),
        centroids,
        inertia,
        iterations,
    };
    (assignment, trace)
}

fn check_kmeans_inputs(points: &Array2<f64>, k: usize) -> Result<()> {
    let n = points.nrows();
    if n == 0 || points.ncols() == 0 {
        return Err(Error::ShapeError(
            "k-means needs a nonempty point matrix".into(),
        ));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidRecipe(format!(
            "cluster count must satisfy 1 <= k <= N, got k = {k} with N = {n}"
        )));
    }
    for (&v, i) in points.iter().zip(0..) {
        if !v.is_finite() {
            return Err(Error::InvalidData(format!(
                "k-means input contains a non-finite value at sample {}",
                i / points.ncols() + 1
            )));
        }
    }
    Ok(())
}

/// k-means with distance-squared seeding on rows of `points` (N x m).
/// Identical seeds give identical results.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64) -> Result<ClusterAssignment> {
    kmeans_with_trace(points, k, seed).map(|(a, _)| a)
}

/// [`kmeans`] returning the inertia after every Lloyd iteration; the trace
/// never increases.
pub fn kmeans_with_trace(
    points: &Array2<f64>,
    k: usize,
    seed: u64,
) -> Result<(ClusterAssignment, Vec<f64>)> {
    check_kmeans_inputs(points, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = seed_centroids(points, k, &mut rng);
    Ok(lloyd(points, centroids))
}

/// Clusters the nodes of `g` into k groups: spectral coordinates first,
/// then k-means on the unit-length columns.
pub fn spectral_cluster(g: &SimilarityGraph, k: usize, seed: u64) -> Result<ClusterAssignment> {
    let coords = spectral_coordinates(g, k)?;
    kmeans(&coords.samples(), k, seed)
}

fn pairs(n: u128) -> u128 {
    n * n.saturating_sub(1) / 2
}

/// Adjusted Rand index between two labelings of the same samples.
///
/// Label values are arbitrary; only the induced partitions matter. Returns
/// 1.0 for identical partitions, about 0.0 for independent ones, and is
/// defined as 1.0 when the expected and maximal pair counts coincide (for
/// instance two all-singleton partitions).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeError(format!(
            "label slices differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::ShapeError("label slices are empty".into()));
    }
    use std::collections::BTreeMap;
    let mut cross: BTreeMap<(usize, usize), u128> = BTreeMap::new();
    let mut rows: BTreeMap<usize, u128> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u128> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cross.entry((x, y)).or_insert(0) += 1;
        *rows.entry(x).or_insert(0) += 1;
        *cols.entry(y).or_insert(0) += 1;
    }
    let sum_cross: u128 = cross.values().map(|&c| pairs(c)).sum();
    let sum_rows: u128 = rows.values().map(|&c| pairs(c)).sum();
    let sum_cols: u128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u128);

    // the index degenerates exactly when max_index equals expected_index:
    // total * (sum_rows + sum_cols) == 2 * sum_rows * sum_cols
    if total * (sum_rows + sum_cols) == 2 * sum_rows * sum_cols {
        return Ok(1.0);
    }
    let expected = (sum_rows as f64) * (sum_cols as f64) / (total as f64);
    let max_index = 0.5 * (sum_rows as f64 + sum_cols as f64);
    Ok((sum_cross as f64 - expected) / (max_index - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::from_edge_list;
    use ndarray::array;

    fn two_cliques() -> SimilarityGraph {
        // nodes 1-3 fully connected, nodes 4-6 fully connected, no cross edges
        from_edge_list(
            6,
            &[
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 3, 1.0),
                (4, 5, 1.0),
                (4, 6, 1.0),
                (5, 6, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_clique_coordinates_collapse_within_and_separate_across() {
        let coords = spectral_coordinates(&two_cliques(), 2).unwrap();
        assert!(coords.zero_columns.is_empty());
        let t = coords.coords;
        // within a clique the unit coordinate vectors coincide
        for group in [[0usize, 1, 2], [3, 4, 5]] {
            for pair in group.windows(2) {
                let d = (0..2)
                    .map(|u| (t[[u, pair[0]]] - t[[u, pair[1]]]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(d <= 1e-9, "within-clique spread {d}");
            }
        }
        // across cliques they are orthogonal unit vectors, distance sqrt(2)
        let d = (0..2)
            .map(|u| (t[[u, 0]] - t[[u, 3]]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((d - 2.0f64.sqrt()).abs() <= 1e-9, "cross-clique distance {d}");
    }

    #[test]
    fn single_cluster_coordinates_are_all_ones() {
        let g = from_edge_list(4, &[(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        let coords = spectral_coordinates(&g, 1).unwrap();
        for j in 0..4 {
            assert!((coords.coords[[0, j]] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn coordinates_reject_bad_cluster_count() {
        let g = two_cliques();
        assert_eq!(
            spectral_coordinates(&g, 0).unwrap_err().name(),
            "InvalidRecipe"
        );
        assert_eq!(
            spectral_coordinates(&g, 7).unwrap_err().name(),
            "InvalidRecipe"
        );
    }

    #[test]
    fn kmeans_two_pairs_on_a_line() {
        let pts = array![[0.0], [0.1], [10.0], [10.1]];
        for seed in 0..8 {
            let a = kmeans(&pts, 2, seed).unwrap();
            assert_eq!(a.labels[0], a.labels[1]);
            assert_eq!(a.labels[2], a.labels[3]);
            assert_ne!(a.labels[0], a.labels[2]);
            assert!((a.inertia - 0.01).abs() <= 1e-12, "inertia {}", a.inertia);
            // centroids are the pair means, in one order or the other
            let mut centers: Vec<f64> = a.centroids.column(0).to_vec();
            centers.sort_by(f64::total_cmp);
            assert!((centers[0] - 0.05).abs() <= 1e-12);
            assert!((centers[1] - 10.05).abs() <= 1e-12);
        }
    }

    #[test]
    fn kmeans_is_deterministic_per_seed() {
        let pts = array![
            [0.0, 0.0],
            [0.2, 0.1],
            [5.0, 5.0],
            [5.1, 4.9],
            [-3.0, 4.0],
            [-3.1, 4.2]
        ];
        let a = kmeans(&pts, 3, 42).unwrap();
        let b = kmeans(&pts, 3, 42).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia.to_bits(), b.inertia.to_bits());
        for (x, y) in a.centroids.iter().zip(b.centroids.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn kmeans_trace_never_increases() {
        let pts = array![
            [0.0, 0.0],
            [1.0, 0.5],
            [0.5, 1.0],
            [9.0, 9.0],
            [9.5, 8.5],
            [4.0, 4.5],
            [4.5, 4.0],
            [0.2, 0.8]
        ];
        for seed in 0..10 {
            let (_, trace) = kmeans_with_trace(&pts, 3, seed).unwrap();
            assert!(!trace.is_empty());
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "trace increased: {w:?}");
            }
        }
    }

    #[test]
    fn kmeans_validates_inputs() {
        let pts = array![[0.0], [1.0]];
        assert_eq!(kmeans(&pts, 0, 0).unwrap_err().name(), "InvalidRecipe");
        assert_eq!(kmeans(&pts, 3, 0).unwrap_err().name(), "InvalidRecipe");
        let bad = array![[0.0], [f64::NAN]];
        assert_eq!(kmeans(&bad, 1, 0).unwrap_err().name(), "InvalidData");
    }

    #[test]
    fn kmeans_handles_duplicate_points() {
        // fewer distinct locations than clusters still terminates
        let pts = array![[0.0, 0.0], [0.0, 0.0], [10.0, 10.0]];
        let a = kmeans(&pts, 3, 7).unwrap();
        assert!(a.iterations < MAX_KMEANS_ITERS);
        assert!(a.inertia <= 1e-12);
    }

    #[test]
    fn empty_cluster_restarts_at_farthest_point() {
        // both starting centroids sit beyond the data, so every point picks
        // the nearer one and the other empties; it must restart and split
        let pts = array![[0.0], [1.0]];
        let centroids = array![[10.0], [20.0]];
        let (a, _) = lloyd(&pts, centroids);
        assert_eq!(a.labels.iter().filter(|&&l| l == 1).count(), 1);
        assert_eq!(a.labels.iter().filter(|&&l| l == 2).count(), 1);
        assert!(a.inertia <= 1e-12);
    }

    #[test]
    fn spectral_cluster_recovers_components_every_seed() {
        let truth = [1usize, 2, 1, 2, 1, 2, 1];
        let g = from_edge_list(
            7,
            &[
                (1, 3, 1.0),
                (3, 5, 0.5),
                (5, 7, 2.0),
                (2, 4, 1.0),
                (4, 6, 0.3),
            ],
        )
        .unwrap();
        for seed in 0..10 {
            let a = spectral_cluster(&g, 2, seed).unwrap();
            let ari = adjusted_rand_index(&a.labels, &truth).unwrap();
            assert!((ari - 1.0).abs() <= 1e-12, "seed {seed}: ari {ari}");
        }
    }

    #[test]
    fn spectral_cluster_three_components() {
        let g = from_edge_list(
            6,
            &[(1, 2, 1.0), (3, 4, 0.5), (5, 6, 2.0)],
        )
        .unwrap();
        let truth = [1usize, 1, 2, 2, 3, 3];
        for seed in 0..10 {
            let a = spectral_cluster(&g, 3, seed).unwrap();
            let ari = adjusted_rand_index(&a.labels, &truth).unwrap();
            assert!((ari - 1.0).abs() <= 1e-12, "seed {seed}: ari {ari}");
        }
    }

    #[test]
    fn coordinates_invariant_under_weight_scaling() {
        let g = two_cliques();
        let scaled =
            SimilarityGraph::from_weights(g.weights().mapv(|w| w * 7.3)).unwrap();
        let a = spectral_coordinates(&g, 2).unwrap();
        let b = spectral_coordinates(&scaled, 2).unwrap();
        for (x, y) in a.coords.iter().zip(b.coords.iter()) {
            assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn rand_index_hand_values() {
        assert_eq!(
            adjusted_rand_index(&[1, 1, 2, 2], &[1, 1, 2, 2]).unwrap(),
            1.0
        );
        assert_eq!(
            adjusted_rand_index(&[1, 1, 2, 2], &[2, 2, 1, 1]).unwrap(),
            1.0
        );
        // maximally crossed partitions of four samples
        let v = adjusted_rand_index(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap();
        assert!((v - (-0.5)).abs() <= 1e-12, "got {v}");
        // one trivial partition gives zero
        let v = adjusted_rand_index(&[1, 1, 1, 1], &[1, 1, 2, 2]).unwrap();
        assert!(v.abs() <= 1e-12, "got {v}");
    }

    #[test]
    fn rand_index_degenerate_cases() {
        assert_eq!(adjusted_rand_index(&[1, 1], &[1, 1]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[1, 2], &[3, 7]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[5], &[9]).unwrap(), 1.0);
    }

    #[test]
    fn rand_index_ignores_label_names() {
        let a = [1usize, 1, 2, 2, 3, 3];
        let b = [9usize, 9, 4, 4, 100, 100];
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);
        let c = [1usize, 2, 2, 3, 3, 3];
        let v1 = adjusted_rand_index(&a, &c).unwrap();
        let relabeled: Vec<usize> = c.iter().map(|&l| l + 10).collect();
        let v2 = adjusted_rand_index(&a, &relabeled).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn rand_index_validates_inputs() {
        assert_eq!(
            adjusted_rand_index(&[1, 2], &[1]).unwrap_err().name(),
            "ShapeError"
        );
        assert_eq!(adjusted_rand_index(&[], &[]).unwrap_err().name(), "ShapeError");
    }
}
