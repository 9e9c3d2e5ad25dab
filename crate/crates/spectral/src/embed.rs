//! Spectral embeddings: Laplacian eigenmaps and locality preserving
//! projections.
//!
//! Laplacian eigenmaps assign coordinates directly to the training nodes:
//! component u of the embedding is generalized eigenvector w_{u+1}, skipping
//! the constant kernel vector. There is no map for unseen points.
//!
//! Locality preserving projections restrict the assignment to linear
//! functions of the features, w = F^T z, which turns the problem into
//! (F L F^T) z = lambda (F D F^T) z on the feature side and yields an
//! out-of-sample map y = f(x)^T z. The feature matrix may be the raw
//! coordinates or a monomial expansion of them. Because F D F^T is often
//! rank-deficient, the solver whitens it first and works in the surviving
//! directions only.

use ndarray::{Array1, Array2};

use crate::eigen::{generalized_eig, sym_eig, Spectrum};
use crate::error::{Error, Result};
use crate::graph::{DataSet, SimilarityGraph};
use crate::laplacian::{connected_components, degree_vector, laplacian};

/// Relative cutoff below which a whitened constraint direction is discarded.
const RANK_TOL: f64 = 1e-10;
/// Variance below which an embedding component is flagged as near-constant.
const CONSTANT_TOL: f64 = 1e-10;

/// Which algorithm produced an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingSource {
    Lem,
    Lpp,
}

/// An m-dimensional embedding of N samples; row u holds component u of
/// every sample, so columns line up with the original sample order.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub coords: Array2<f64>,
    pub source: EmbeddingSource,
}

impl Embedding {
    pub fn dimension(&self) -> usize {
        self.coords.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.coords.ncols()
    }
}

/// Constraint controlling which eigenproblem the eigenmap solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LemConstraint {
    /// Unit weighted norm w^T D w = 1: the generalized problem.
    #[default]
    DWeighted,
    /// Unit norm w^T w = 1: the ordinary problem on L.
    Identity,
}

fn lem_spectrum(g: &SimilarityGraph, constraint: LemConstraint) -> Result<Spectrum> {
    let l = laplacian(g);
    match constraint {
        LemConstraint::DWeighted => generalized_eig(&l, &degree_vector(g)),
        LemConstraint::Identity => sym_eig(&l),
    }
}

/// Laplacian eigenmap of a connected graph under the default weighted
/// constraint.
///
/// Component u of the result is eigenvector w_{u+1} of L w = lambda D w;
/// the constant solution w_1 carries no information and is skipped.
/// Requires 1 <= m <= N-1 and a connected graph.
pub fn lem_embed(g: &SimilarityGraph, m: usize) -> Result<Embedding> {
    lem_embed_with(g, m, LemConstraint::DWeighted)
}

/// [`lem_embed`] with an explicit normalization constraint.
pub fn lem_embed_with(
    g: &SimilarityGraph,
    m: usize,
    constraint: LemConstraint,
) -> Result<Embedding> {
    let n = g.n_nodes();
    if m == 0 || m + 1 > n {
        return Err(Error::ShapeError(format!(
            "embedding dimension must satisfy 1 <= m <= N-1, got m = {m} with N = {n}"
        )));
    }
    let components = connected_components(g);
    if components.count > 1 {
        return Err(Error::DisconnectedGraph {
            components: components.count,
        });
    }
    let spectrum = lem_spectrum(g, constraint)?;
    let mut coords = Array2::zeros((m, n));
    for u in 0..m {
        for j in 0..n {
            coords[[u, j]] = spectrum.eigenvectors[[j, u + 1]];
        }
    }
    Ok(Embedding {
        coords,
        source: EmbeddingSource::Lem,
    })
}

/// Feature expansion applied before fitting a projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    /// All monomials of the coordinates up to the given degree (1 or 2),
    /// ordered as x_1..x_d, then the degree-two terms x_a * x_b for a <= b
    /// in lexicographic order.
    Monomials { degree: usize },
}

/// Expands each sample into monomials of its coordinates up to `degree`.
///
/// Degree 1 returns the data unchanged. Degree 2 appends the pairwise
/// products: in two dimensions the feature order is
/// (x1, x2, x1^2, x1*x2, x2^2).
pub fn expand_monomials(data: &DataSet, degree: usize) -> Result<DataSet> {
    match degree {
        1 => Ok(data.clone()),
        2 => {
            let n = data.n_samples();
            let d = data.dim();
            let p = d + d * (d + 1) / 2;
            let pts = data.points();
            let mut out = Array2::zeros((n, p));
            for i in 0..n {
                for j in 0..d {
                    out[[i, j]] = pts[[i, j]];
                }
                let mut col = d;
                for a in 0..d {
                    for b in a..d {
                        out[[i, col]] = pts[[i, a]] * pts[[i, b]];
                        col += 1;
                    }
                }
            }
            DataSet::new(out)
        }
        other => Err(Error::InvalidExpansion(format!(
            "monomial degree must be 1 or 2, got {other}"
        ))),
    }
}

fn apply_expansion(data: &DataSet, expansion: Option<Expansion>) -> Result<DataSet> {
    match expansion {
        None => Ok(data.clone()),
        Some(Expansion::Monomials { degree }) => expand_monomials(data, degree),
    }
}

/// A fitted locality preserving projection.
///
/// `projections` holds the feature-space directions z_u as columns (P x m);
/// applying the model computes y = f(x)^T z_u per component. Components
/// whose training values have variance below 1e-10 are flagged in
/// `near_constant`: they separate nothing and usually indicate that the
/// feature span contains an almost-constant direction.
#[derive(Debug, Clone)]
pub struct LppModel {
    pub projections: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    pub expansion: Option<Expansion>,
    pub near_constant: Vec<bool>,
    input_dim: usize,
}

impl LppModel {
    pub fn dimension(&self) -> usize {
        self.projections.ncols()
    }

    pub fn n_features(&self) -> usize {
        self.projections.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// Fits an m-dimensional locality preserving projection of `data` under the
/// neighborhood structure of `g`.
///
/// The generalized problem (F L F^T) z = lambda (F D F^T) z is solved by
/// whitening: the constraint matrix is diagonalized, directions with
/// eigenvalue below 1e-10 of the largest are dropped as numerically
/// unobservable, and the projected ordinary problem is solved in the
/// remaining coordinates. Fails with `SingularConstraint` when fewer than m
/// directions survive.
pub fn lpp_fit(
    data: &DataSet,
    g: &SimilarityGraph,
    m: usize,
    expansion: Option<Expansion>,
) -> Result<LppModel> {
    let n = data.n_samples();
    if g.n_nodes() != n {
        return Err(Error::ShapeError(format!(
            "graph has {} nodes but the data set has {} samples",
            g.n_nodes(),
            n
        )));
    }
    let features = apply_expansion(data, expansion)?;
    let p = features.dim();
    if m == 0 || m > p {
        return Err(Error::ShapeError(format!(
            "projection count must satisfy 1 <= m <= {p} (feature dimension), got {m}"
        )));
    }

    // feature-side matrices L' = F L F^T and D' = F D F^T with F = X^T (P x N)
    let f = features.points().t().to_owned();
    let l = laplacian(g);
    let d = degree_vector(g);
    let l_feat = symmetrize(&f.dot(&l).dot(&f.t()));
    let mut f_scaled = f.clone();
    for ((_, j), v) in f_scaled.indexed_iter_mut() {
        *v *= d[j];
    }
    let d_feat = symmetrize(&f_scaled.dot(&f.t()));

    // whiten the constraint matrix
    let d_spec = sym_eig(&d_feat)?;
    let lambda_max = d_spec.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let kept: Vec<usize> = (0..p)
        .filter(|&i| d_spec.eigenvalues[i] > RANK_TOL * lambda_max)
        .collect();
    let rank = kept.len();
    if rank < m {
        return Err(Error::SingularConstraint { rank });
    }
    let mut whitener = Array2::zeros((p, rank));
    for (col, &i) in kept.iter().enumerate() {
        let scale = 1.0 / d_spec.eigenvalues[i].sqrt();
        for r in 0..p {
            whitener[[r, col]] = d_spec.eigenvectors[[r, i]] * scale;
        }
    }

    // ordinary problem in the whitened coordinates
    let projected = symmetrize(&whitener.t().dot(&l_feat).dot(&whitener));
    let spec = sym_eig(&projected)?;
    let mut projections = Array2::zeros((p, m));
    for u in 0..m {
        let z = whitener.dot(&spec.eigenvectors.column(u).to_owned());
        for r in 0..p {
            projections[[r, u]] = z[r];
        }
    }
    fix_column_signs(&mut projections);

    // flag solutions whose node values barely vary
    let values = projections.t().dot(&f);
    let mut near_constant = Vec::with_capacity(m);
    for u in 0..m {
        let row = values.row(u);
        let mean = row.sum() / n as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        near_constant.push(var < CONSTANT_TOL);
    }

    Ok(LppModel {
        projections,
        eigenvalues: Array1::from_iter(spec.eigenvalues.iter().take(m).copied()),
        expansion,
        near_constant,
        input_dim: data.dim(),
    })
}

/// Applies a fitted projection to (new) data: y_u = f(x)^T z_u.
pub fn lpp_transform(model: &LppModel, data: &DataSet) -> Result<Embedding> {
    if data.dim() != model.input_dim {
        return Err(Error::ShapeError(format!(
            "model was fitted on {}-dimensional inputs, got {}",
            model.input_dim,
            data.dim()
        )));
    }
    let features = apply_expansion(data, model.expansion)?;
    let f = features.points().t().to_owned();
    let coords = model.projections.t().dot(&f);
    Ok(Embedding {
        coords,
        source: EmbeddingSource::Lpp,
    })
}

fn symmetrize(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut out = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            out[[i, j]] = m;
            out[[j, i]] = m;
        }
    }
    out
}

fn fix_column_signs(m: &mut Array2<f64>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    for u in 0..cols {
        for i in 0..rows {
            let v = m[[i, u]];
            if v.abs() > 1e-9 {
                if v < 0.0 {
                    for r in 0..rows {
                        m[[r, u]] = -m[[r, u]];
                    }
                }
                break;
            }
        }
    }
}
