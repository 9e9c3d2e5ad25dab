//! Graph Laplacians and connectivity.
//!
//! For a weight matrix W with degree vector d_i = sum_j W_ij:
//!
//! | operator        | definition              |
//! |-----------------|-------------------------|
//! | plain           | L = D - W               |
//! | symmetric       | D^{-1/2} L D^{-1/2}     |
//! | random walk     | D^{-1} L                |
//!
//! The plain Laplacian always exists; both normalized forms require every
//! degree to be strictly positive and report the first isolated node
//! otherwise.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// Degrees, plain Laplacian, and the normalized variants when they exist.
///
/// The normalized fields are `None` exactly when the graph has an isolated
/// node.
#[derive(Debug, Clone)]
pub struct LaplacianBundle {
    pub degrees: Array1<f64>,
    pub laplacian: Array2<f64>,
    pub sym_normalized: Option<Array2<f64>>,
    pub random_walk: Option<Array2<f64>>,
}

impl LaplacianBundle {
    pub fn build(g: &SimilarityGraph) -> Self {
        LaplacianBundle {
            degrees: degree_vector(g),
            laplacian: laplacian(g),
            sym_normalized: sym_normalized(g).ok(),
            random_walk: random_walk_normalized(g).ok(),
        }
    }
}

/// Row sums of the weight matrix.
pub fn degree_vector(g: &SimilarityGraph) -> Array1<f64> {
    let w = g.weights();
    let n = g.n_nodes();
    Array1::from_iter((0..n).map(|i| w.row(i).sum()))
}

/// L = D - W.
pub fn laplacian(g: &SimilarityGraph) -> Array2<f64> {
    let w = g.weights();
    let d = degree_vector(g);
    let n = g.n_nodes();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            l[[i, j]] = if i == j { d[i] - w[[i, i]] } else { -w[[i, j]] };
        }
    }
    l
}

fn positive_degrees(g: &SimilarityGraph) -> Result<Array1<f64>> {
    let d = degree_vector(g);
    for (i, &di) in d.iter().enumerate() {
        if di <= 0.0 {
            return Err(Error::IsolatedNode(i + 1));
        }
    }
    Ok(d)
}

/// Symmetric normalized Laplacian D^{-1/2} L D^{-1/2}.
pub fn sym_normalized(g: &SimilarityGraph) -> Result<Array2<f64>> {
    let d = positive_degrees(g)?;
    let inv_sqrt: Array1<f64> = d.mapv(|x| 1.0 / x.sqrt());
    let l = laplacian(g);
    let n = g.n_nodes();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = inv_sqrt[i] * l[[i, j]] * inv_sqrt[j];
        }
    }
    Ok(out)
}

/// Random-walk normalized Laplacian D^{-1} L.
pub fn random_walk_normalized(g: &SimilarityGraph) -> Result<Array2<f64>> {
    let d = positive_degrees(g)?;
    let l = laplacian(g);
    let n = g.n_nodes();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = l[[i, j]] / d[i];
        }
    }
    Ok(out)
}

/// Connected-component labeling of a graph.
///
/// `labels[i]` is the 1-based id of node i's component; ids are assigned in
/// order of first occurrence, so node 1 always carries label 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    pub labels: Vec<usize>,
    pub count: usize,
}

/// Labels connected components by breadth-first search over positive-weight
/// edges. Iterative, so deep graphs cannot overflow the stack.
pub fn connected_components(g: &SimilarityGraph) -> ComponentLabels {
    let n = g.n_nodes();
    let w = g.weights();
    let mut labels = vec![0usize; n];
    let mut count = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if labels[j] == 0 && w[[i, j]] > 0.0 {
                    labels[j] = count;
                    queue.push_back(j);
                }
            }
        }
    }
    ComponentLabels { labels, count }
}

/// Checks the defining structure of a Laplacian matrix: symmetry, zero row
/// and column sums, nonnegative diagonal, nonpositive off-diagonal. `rel_tol`
/// is measured against the largest absolute entry.
pub fn is_valid_laplacian(l: &Array2<f64>, rel_tol: f64) -> bool {
    let n = l.nrows();
    if l.ncols() != n || n == 0 {
        return false;
    }
    let scale = l.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = rel_tol * scale.max(1e-300);
    for i in 0..n {
        if l[[i, i]] < -tol {
            return false;
        }
        let mut row_sum = 0.0;
        let mut col_sum = 0.0;
        for j in 0..n {
            if i != j && l[[i, j]] > tol {
                return false;
            }
            if (l[[i, j]] - l[[j, i]]).abs() > tol {
                return false;
            }
            row_sum += l[[i, j]];
            col_sum += l[[j, i]];
        }
        if row_sum.abs() > tol || col_sum.abs() > tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::from_edge_list;
    use ndarray::array;

    /// 3-node path with edge weights 0.2 and 0.8.
    pub(crate) fn weighted_path3() -> SimilarityGraph {
        from_edge_list(3, &[(1, 2, 0.2), (2, 3, 0.8)]).unwrap()
    }

    /// 7 nodes, two interleaved components: {1,3,5,7} as a path and
    /// {2,4,6} as a path, unit weights.
    pub(crate) fn interleaved_two_component() -> SimilarityGraph {
        from_edge_list(
            7,
            &[
                (1, 3, 1.0),
                (3, 5, 1.0),
                (5, 7, 1.0),
                (2, 4, 1.0),
                (4, 6, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn degrees_of_weighted_path() {
        let d = degree_vector(&weighted_path3());
        assert_eq!(d[0], 0.2);
        assert_eq!(d[1], 1.0);
        assert_eq!(d[2], 0.8);
    }

    #[test]
    fn laplacian_of_weighted_path() {
        let l = laplacian(&weighted_path3());
        let expected = array![[0.2, -0.2, 0.0], [-0.2, 1.0, -0.8], [0.0, -0.8, 0.8]];
        for (a, b) in l.iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn sym_normalized_of_weighted_path() {
        let lhat = sym_normalized(&weighted_path3()).unwrap();
        let s2 = 0.2f64.sqrt();
        let s8 = 0.8f64.sqrt();
        let expected = array![[1.0, -s2, 0.0], [-s2, 1.0, -s8], [0.0, -s8, 1.0]];
        for (a, b) in lhat.iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn random_walk_of_weighted_path() {
        let lrw = random_walk_normalized(&weighted_path3()).unwrap();
        let expected = array![[1.0, -1.0, 0.0], [-0.2, 1.0, -0.8], [0.0, -1.0, 1.0]];
        for (a, b) in lrw.iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn random_walk_is_similarity_transform_of_sym() {
        // D^{-1/2} Lhat D^{1/2} recovers the random-walk form
        let g = weighted_path3();
        let d = degree_vector(&g);
        let lhat = sym_normalized(&g).unwrap();
        let lrw = random_walk_normalized(&g).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = lhat[[i, j]] * (d[j] / d[i]).sqrt();
                assert!((v - lrw[[i, j]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_vector_in_kernel() {
        let g = weighted_path3();
        let l = laplacian(&g);
        let ones = Array1::from_elem(3, 1.0);
        let r = l.dot(&ones);
        for v in r.iter() {
            assert!(v.abs() <= 1e-12);
        }
        // Lhat kills sqrt(d)
        let lhat = sym_normalized(&g).unwrap();
        let sqrt_d = degree_vector(&g).mapv(f64::sqrt);
        let r = lhat.dot(&sqrt_d);
        for v in r.iter() {
            assert!(v.abs() <= 1e-12);
        }
    }

    #[test]
    fn isolated_node_reported_with_one_based_id() {
        let g = from_edge_list(3, &[(1, 2, 1.0)]).unwrap();
        match sym_normalized(&g).unwrap_err() {
            Error::IsolatedNode(i) => assert_eq!(i, 3),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(random_walk_normalized(&g).is_err());
        let bundle = LaplacianBundle::build(&g);
        assert!(bundle.sym_normalized.is_none());
        assert!(bundle.random_walk.is_none());
        assert_eq!(bundle.degrees.len(), 3);
    }

    #[test]
    fn bundle_populates_normalized_forms_when_valid() {
        let bundle = LaplacianBundle::build(&weighted_path3());
        assert!(bundle.sym_normalized.is_some());
        assert!(bundle.random_walk.is_some());
        assert!(is_valid_laplacian(&bundle.laplacian, 1e-12));
    }

    #[test]
    fn components_of_interleaved_graph() {
        let c = connected_components(&interleaved_two_component());
        assert_eq!(c.count, 2);
        assert_eq!(c.labels, vec![1, 2, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn components_of_connected_and_edgeless() {
        assert_eq!(connected_components(&weighted_path3()).count, 1);
        let lonely = SimilarityGraph::from_weights(Array2::zeros((4, 4))).unwrap();
        let c = connected_components(&lonely);
        assert_eq!(c.count, 4);
        assert_eq!(c.labels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn single_node_graph() {
        let g = SimilarityGraph::from_weights(Array2::zeros((1, 1))).unwrap();
        assert_eq!(connected_components(&g).count, 1);
        assert_eq!(laplacian(&g)[[0, 0]], 0.0);
        assert!(sym_normalized(&g).is_err());
    }

    #[test]
    fn laplacian_validator_catches_defects() {
        let good = laplacian(&weighted_path3());
        assert!(is_valid_laplacian(&good, 1e-12));
        let mut bad = good.clone();
        bad[[0, 1]] = 0.3; // positive off-diagonal, broken row sum
        assert!(!is_valid_laplacian(&bad, 1e-12));
    }
}
