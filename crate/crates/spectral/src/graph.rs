//! Similarity graph construction.
//!
//! A point cloud becomes an undirected weighted graph through one of three
//! recipes: epsilon neighborhoods, k-nearest neighbors (mutual or symmetric),
//! or the fully connected Gaussian graph. Graphs can also be given directly
//! as an edge list. All recipes produce a [`SimilarityGraph`], whose weight
//! matrix is symmetric with bit-identical mirrored entries, nonnegative, and
//! zero on the diagonal.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// N points in d-dimensional space, one row per sample.
///
/// Construction validates that the set is nonempty and every coordinate is
/// finite, so downstream distance computations never see NaN or infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: Array2<f64>,
}

impl DataSet {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::InvalidData(format!(
                "data set must be nonempty, got {} samples x {} dims",
                points.nrows(),
                points.ncols()
            )));
        }
        for ((i, j), &v) in points.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::InvalidData(format!(
                    "non-finite coordinate at sample {}, dim {}",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(DataSet { points })
    }

    pub fn n_samples(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn sample(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }
}

/// Undirected weighted graph stored as a dense N x N weight matrix.
///
/// Invariants, checked at every construction site:
/// - `weights[i][j] == weights[j][i]` bit for bit,
/// - all entries nonnegative and finite,
/// - zero diagonal (no self-loops).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    weights: Array2<f64>,
}

impl SimilarityGraph {
    /// Wraps a weight matrix, verifying every graph invariant.
    pub fn from_weights(weights: Array2<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n || n == 0 {
            return Err(Error::ShapeError(format!(
                "weight matrix must be square and nonempty, got {} x {}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(Error::InvalidData(format!(
                    "nonzero diagonal entry at node {}",
                    i + 1
                )));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidData(format!(
                        "weight ({}, {}) must be finite and nonnegative, got {w}",
                        i + 1,
                        j + 1
                    )));
                }
                if w.to_bits() != weights[[j, i]].to_bits() {
                    return Err(Error::InvalidData(format!(
                        "weight matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SimilarityGraph { weights })
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }
}

/// Edge weight assignment shared by the neighborhood recipes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    /// Every selected edge gets weight 1. Discards distance information,
    /// which is a real loss for k-NN graphs whose edges already span very
    /// different length scales.
    Binary,
    /// Gaussian similarity exp(-dist^2 / (2 sigma^2)) of the selected edge.
    Gaussian { sigma: f64 },
}

/// How the directed k-nearest-neighbor relation is symmetrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnMode {
    /// Keep {i, j} only when each node lists the other (AND).
    Mutual,
    /// Keep {i, j} when either node lists the other (OR).
    Symmetric,
}

/// Declarative description of a graph construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphRecipe {
    Epsilon { epsilon: f64, weighting: Weighting },
    Knn { k: usize, mode: KnnMode, weighting: Weighting },
    Full { sigma: f64 },
}

/// Dense Euclidean distance matrix.
///
/// Each unordered pair is evaluated once and mirrored, so the result is
/// exactly symmetric regardless of how the row blocks are scheduled across
/// threads.
pub fn pairwise_distances(data: &DataSet) -> Array2<f64> {
    let n = data.n_samples();
    let pts = data.points();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = pts.row(i);
            ((i + 1)..n)
                .map(|j| {
                    let xj = pts.row(j);
                    xi.iter()
                        .zip(xj.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    let mut m = Array2::zeros((n, n));
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            m[[i, j]] = d;
            m[[j, i]] = d;
        }
    }
    m
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidRecipe(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

fn check_weighting(weighting: Weighting) -> Result<()> {
    match weighting {
        Weighting::Binary => Ok(()),
        Weighting::Gaussian { sigma } => check_sigma(sigma),
    }
}

fn edge_weight(dist: f64, weighting: Weighting) -> f64 {
    match weighting {
        Weighting::Binary => 1.0,
        Weighting::Gaussian { sigma } => (-dist * dist / (2.0 * sigma * sigma)).exp(),
    }
}

/// Connects every pair closer than `epsilon` (strict inequality).
pub fn build_epsilon_graph(
    data: &DataSet,
    epsilon: f64,
    weighting: Weighting,
) -> Result<SimilarityGraph> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidRecipe(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    check_weighting(weighting)?;
    let dist = pairwise_distances(data);
    let n = data.n_samples();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[[i, j]] < epsilon {
                let v = edge_weight(dist[[i, j]], weighting);
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    SimilarityGraph::from_weights(w)
}

/// For each node, the indices of its k nearest other nodes, ties broken by
/// the lower node index.
fn nearest_lists(dist: &Array2<f64>, k: usize) -> Vec<Vec<usize>> {
    let n = dist.nrows();
    (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| {
                dist[[i, a]]
                    .total_cmp(&dist[[i, b]])
                    .then(a.cmp(&b))
            });
            order.truncate(k);
            order
        })
        .collect()
}

/// k-nearest-neighbor graph.
///
/// The directed relation "j is among the k nearest of i" is symmetrized
/// per `mode`; selected edges are weighted per `weighting`. Requires
/// 1 <= k <= N-1.
pub fn build_knn_graph(
    data: &DataSet,
    k: usize,
    mode: KnnMode,
    weighting: Weighting,
) -> Result<SimilarityGraph> {
    let n = data.n_samples();
    if k == 0 || k + 1 > n {
        return Err(Error::InvalidRecipe(format!(
            "k must satisfy 1 <= k <= N-1, got k = {k} with N = {n}"
        )));
    }
    check_weighting(weighting)?;
    let dist = pairwise_distances(data);
    let lists = nearest_lists(&dist, k);
    let mut listed = Array2::from_elem((n, n), false);
    for (i, list) in lists.iter().enumerate() {
        for &j in list {
            listed[[i, j]] = true;
        }
    }
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let keep = match mode {
                KnnMode::Mutual => listed[[i, j]] && listed[[j, i]],
                KnnMode::Symmetric => listed[[i, j]] || listed[[j, i]],
            };
            if keep {
                let v = edge_weight(dist[[i, j]], weighting);
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    SimilarityGraph::from_weights(w)
}

/// Fully connected graph with Gaussian weights exp(-dist^2 / (2 sigma^2)).
pub fn build_full_graph(data: &DataSet, sigma: f64) -> Result<SimilarityGraph> {
    check_sigma(sigma)?;
    let dist = pairwise_distances(data);
    let n = data.n_samples();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = edge_weight(dist[[i, j]], Weighting::Gaussian { sigma });
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    SimilarityGraph::from_weights(w)
}

/// Builds a graph from 1-based `(i, j, w)` edges over `n_nodes` nodes.
///
/// Rejects out-of-range indices, self-loops, duplicate unordered pairs, and
/// weights that are not strictly positive and finite.
pub fn from_edge_list(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<SimilarityGraph> {
    if n_nodes == 0 {
        return Err(Error::InvalidEdgeList("graph needs at least one node".into()));
    }
    let mut w = Array2::zeros((n_nodes, n_nodes));
    for &(i, j, weight) in edges {
        if i == 0 || j == 0 || i > n_nodes || j > n_nodes {
            return Err(Error::InvalidEdgeList(format!(
                "edge ({i}, {j}) out of range for {n_nodes} nodes (indices are 1-based)"
            )));
        }
        if i == j {
            return Err(Error::InvalidEdgeList(format!("self-loop at node {i}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidEdgeList(format!(
                "edge ({i}, {j}) weight must be positive and finite, got {weight}"
            )));
        }
        if w[[i - 1, j - 1]] != 0.0 {
            return Err(Error::InvalidEdgeList(format!("duplicate edge ({i}, {j})")));
        }
        w[[i - 1, j - 1]] = weight;
        w[[j - 1, i - 1]] = weight;
    }
    SimilarityGraph::from_weights(w)
}

/// Dispatches to the builder named by the recipe.
pub fn build_graph(data: &DataSet, recipe: &GraphRecipe) -> Result<SimilarityGraph> {
    match *recipe {
        GraphRecipe::Epsilon { epsilon, weighting } => {
            build_epsilon_graph(data, epsilon, weighting)
        }
        GraphRecipe::Knn { k, mode, weighting } => build_knn_graph(data, k, mode, weighting),
        GraphRecipe::Full { sigma } => build_full_graph(data, sigma),
    }
}
