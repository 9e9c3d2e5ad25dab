//! Shared random-instance generators for the integration suites.
//!
//! Ranges are chosen so that every generated weight is either zero or at
//! least e^-4: coordinates live in [-2, 2]^d with d <= 2 (squared
//! distances <= 32) and Gaussian bandwidths start at 2 (denominator >= 8).
//! That keeps spectral gaps far above the kernel-detection threshold, so
//! component counts read off the spectrum are unambiguous.

#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use spectral::{from_edge_list, DataSet, GraphRecipe, KnnMode, SimilarityGraph, Weighting};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform dataset on [-2, 2]^d.
pub fn random_dataset(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DataSet {
    let mut pts = Array2::zeros((n, d));
    for v in pts.iter_mut() {
        *v = rng.random_range(-2.0..2.0);
    }
    DataSet::new(pts).unwrap()
}

fn random_weighting(rng: &mut ChaCha8Rng) -> Weighting {
    if rng.random::<f64>() < 0.5 {
        Weighting::Binary
    } else {
        Weighting::Gaussian {
            sigma: rng.random_range(2.0..4.0),
        }
    }
}

/// One of the three graph recipes with parameters drawn from safe ranges.
pub fn random_recipe(n: usize, rng: &mut ChaCha8Rng) -> GraphRecipe {
    match rng.random_range(0..3) {
        0 => GraphRecipe::Epsilon {
            epsilon: rng.random_range(0.5..4.0),
            weighting: random_weighting(rng),
        },
        1 => GraphRecipe::Knn {
            k: rng.random_range(1..=(n - 1).min(5)),
            mode: if rng.random::<f64>() < 0.5 {
                KnnMode::Mutual
            } else {
                KnnMode::Symmetric
            },
            weighting: random_weighting(rng),
        },
        _ => GraphRecipe::Full {
            sigma: rng.random_range(2.0..4.0),
        },
    }
}

/// Connected graph on n nodes: a random spanning tree plus independent
/// extra edges, all weights in [0.1, 2).
pub fn random_connected_graph(
    n: usize,
    extra_edge_prob: f64,
    rng: &mut ChaCha8Rng,
) -> SimilarityGraph {
    assert!(n >= 1);
    let mut edges = Vec::new();
    let mut have = std::collections::HashSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((j + 1, i + 1, rng.random_range(0.1..2.0)));
        have.insert((j, i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !have.contains(&(i, j)) && rng.random::<f64>() < extra_edge_prob {
                edges.push((i + 1, j + 1, rng.random_range(0.1..2.0)));
            }
        }
    }
    if n == 1 {
        // a single node has no edges; build the 1x1 zero matrix directly
        return SimilarityGraph::from_weights(Array2::zeros((1, 1))).unwrap();
    }
    from_edge_list(n, &edges).unwrap()
}

/// Disjoint connected blocks of the given sizes; returns the graph and the
/// 1-based block label of every node.
pub fn random_block_graph(
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> (SimilarityGraph, Vec<usize>) {
    let n: usize = sizes.iter().sum();
    let mut w = Array2::zeros((n, n));
    let mut labels = Vec::with_capacity(n);
    let mut off = 0;
    for (b, &size) in sizes.iter().enumerate() {
        let block = random_connected_graph(size, 0.3, rng);
        for i in 0..size {
            for j in 0..size {
                w[[off + i, off + j]] = block.weights()[[i, j]];
            }
        }
        labels.extend(std::iter::repeat_n(b + 1, size));
        off += size;
    }
    (SimilarityGraph::from_weights(w).unwrap(), labels)
}

/// 2-D Gaussian blobs around the given centers; returns the points and the
/// 1-based blob label of every sample.
pub fn gaussian_blobs(
    centers: &[[f64; 2]],
    per_blob: usize,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> (DataSet, Vec<usize>) {
    let normal = Normal::new(0.0, sigma).unwrap();
    let n = centers.len() * per_blob;
    let mut pts = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    let mut row = 0;
    for (b, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            pts[[row, 0]] = c[0] + normal.sample(rng);
            pts[[row, 1]] = c[1] + normal.sample(rng);
            labels.push(b + 1);
            row += 1;
        }
    }
    (DataSet::new(pts).unwrap(), labels)
}

/// Unit-weight path graph 1 - 2 - ... - n.
pub fn unit_path(n: usize) -> SimilarityGraph {
    let edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (i, i + 1, 1.0)).collect();
    from_edge_list(n, &edges).unwrap()
}
