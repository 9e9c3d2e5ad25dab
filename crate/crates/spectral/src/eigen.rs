//! Dense symmetric eigensolver and the generalized spectra built on it.
//!
//! The solver is a cyclic Jacobi iteration: sweeps of plane rotations zero
//! one off-diagonal pair at a time until the off-diagonal Frobenius norm
//! drops below 1e-14 of the input norm. Jacobi is slower than tridiagonal
//! methods but every rotation is orthogonal by construction, so eigenvector
//! orthonormality holds to machine precision, which the downstream modules
//! lean on.
//!
//! The generalized problem L w = lambda D w is solved through the symmetric
//! normalized form: with hat(w) = D^{1/2} w the problem becomes
//! hat(L) hat(w) = lambda hat(w), an ordinary symmetric problem; solutions
//! map back via w = D^{-1/2} hat(w) and are rescaled to w^T D w = 1.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Sweep budget for the Jacobi iteration.
const MAX_SWEEPS: usize = 64;
/// Convergence: off-diagonal Frobenius norm relative to the input norm.
const OFF_DIAG_TOL: f64 = 1e-14;
/// Components smaller than this are skipped when fixing eigenvector signs.
const SIGN_TOL: f64 = 1e-9;

/// Normalization and inner product a spectrum's eigenvectors satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Ordinary problem S u = lambda u, with u^T u = 1.
    IdentityNorm,
    /// Generalized problem L w = lambda D w, with w^T D w = 1.
    DWeightedNorm,
    /// Problem on the symmetric normalized Laplacian, hat(w)^T hat(w) = 1.
    HatNorm,
}

/// Eigenvalues in ascending order with eigenvectors as matching columns.
///
/// Column u of `eigenvectors` pairs with `eigenvalues[u]`. The sign of each
/// column is fixed so that its first component with magnitude above 1e-9 is
/// positive, which makes golden files reproducible.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
    pub convention: Convention,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn off_diagonal_frobenius(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[[i, j]] * a[[i, j]];
            }
        }
    }
    s.sqrt()
}

/// Fixes the sign of each eigenvector column in place.
fn fix_signs(vectors: &mut Array2<f64>) {
    let (n, cols) = (vectors.nrows(), vectors.ncols());
    for u in 0..cols {
        for i in 0..n {
            let v = vectors[[i, u]];
            if v.abs() > SIGN_TOL {
                if v < 0.0 {
                    for r in 0..n {
                        vectors[[r, u]] = -vectors[[r, u]];
                    }
                }
                break;
            }
        }
    }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Returns eigenvalues ascending and orthonormal eigenvectors as columns,
/// sign-fixed per the [`Spectrum`] contract. The input must be symmetric
/// within 1e-10 of its largest entry; it is symmetrized exactly before the
/// sweeps. Fails with `NoConvergence` if 64 sweeps do not reach an
/// off-diagonal Frobenius norm of 1e-14 relative to the input.
pub fn sym_eig(s: &Array2<f64>) -> Result<Spectrum> {
    let n = s.nrows();
    if s.ncols() != n || n == 0 {
        return Err(Error::ShapeError(format!(
            "eigensolver needs a square nonempty matrix, got {} x {}",
            s.nrows(),
            s.ncols()
        )));
    }
    let mut max_abs = 0.0f64;
    for &v in s.iter() {
        if !v.is_finite() {
            return Err(Error::ShapeError("matrix has a non-finite entry".into()));
        }
        max_abs = max_abs.max(v.abs());
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((s[[i, j]] - s[[j, i]]).abs());
        }
    }
    if asym > 1e-10 * max_abs {
        return Err(Error::NotSymmetric);
    }

    // exact symmetrization so the rotation updates stay self-consistent
    let mut a = s.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }

    let norm = frobenius(&a);
    let mut v = Array2::eye(n);
    if norm > 0.0 {
        let target = OFF_DIAG_TOL * norm;
        let mut converged = false;
        for _sweep in 0..MAX_SWEEPS {
            if off_diagonal_frobenius(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[[p, q]];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                    // stable tangent of the rotation angle; the large-theta
                    // branch avoids overflow in theta^2
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s_ = t * c;
                    let app = a[[p, p]];
                    let aqq = a[[q, q]];
                    a[[p, p]] = app - t * apq;
                    a[[q, q]] = aqq + t * apq;
                    a[[p, q]] = 0.0;
                    a[[q, p]] = 0.0;
                    for r in 0..n {
                        if r != p && r != q {
                            let arp = a[[r, p]];
                            let arq = a[[r, q]];
                            a[[r, p]] = c * arp - s_ * arq;
                            a[[p, r]] = a[[r, p]];
                            a[[r, q]] = s_ * arp + c * arq;
                            a[[q, r]] = a[[r, q]];
                        }
                    }
                    for r in 0..n {
                        let vrp = v[[r, p]];
                        let vrq = v[[r, q]];
                        v[[r, p]] = c * vrp - s_ * vrq;
                        v[[r, q]] = s_ * vrp + c * vrq;
                    }
                }
            }
        }
        if !converged && off_diagonal_frobenius(&a) > target {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    // ascending sort; the stable sort keeps the Jacobi output order on ties
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[[r, dst]] = v[[r, src]];
        }
    }
    fix_signs(&mut eigenvectors);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        convention: Convention::IdentityNorm,
    })
}

/// [`sym_eig`] for a symmetric normalized Laplacian; only the recorded
/// convention differs, flagging that the vectors live in the hat variables.
pub fn hat_eig(l_hat: &Array2<f64>) -> Result<Spectrum> {
    let mut spectrum = sym_eig(l_hat)?;
    spectrum.convention = Convention::HatNorm;
    Ok(spectrum)
}

/// Solves L w = lambda D w for a Laplacian L and positive degree vector d.
///
/// Internally diagonalizes hat(L) = D^{-1/2} L D^{-1/2}, maps each solution
/// back through w = D^{-1/2} hat(w), rescales to w^T D w = 1, and re-applies
/// the sign convention to the mapped vectors.
pub fn generalized_eig(l: &Array2<f64>, degrees: &Array1<f64>) -> Result<Spectrum> {
    let n = l.nrows();
    if l.ncols() != n || degrees.len() != n {
        return Err(Error::ShapeError(format!(
            "laplacian is {} x {} but degree vector has length {}",
            l.nrows(),
            l.ncols(),
            degrees.len()
        )));
    }
    for (i, &d) in degrees.iter().enumerate() {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::IsolatedNode(i + 1));
        }
    }
    let inv_sqrt: Array1<f64> = degrees.mapv(|x| 1.0 / x.sqrt());
    let mut l_hat = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            l_hat[[i, j]] = inv_sqrt[i] * l[[i, j]] * inv_sqrt[j];
        }
    }
    let hat = sym_eig(&l_hat)?;
    let mut w = Array2::zeros((n, n));
    for u in 0..n {
        for i in 0..n {
            w[[i, u]] = inv_sqrt[i] * hat.eigenvectors[[i, u]];
        }
        let mut dnorm = 0.0;
        for i in 0..n {
            dnorm += degrees[i] * w[[i, u]] * w[[i, u]];
        }
        let scale = 1.0 / dnorm.sqrt();
        for i in 0..n {
            w[[i, u]] *= scale;
        }
    }
    fix_signs(&mut w);
    Ok(Spectrum {
        eigenvalues: hat.eigenvalues,
        eigenvectors: w,
        convention: Convention::DWeightedNorm,
    })
}

/// The smoothness objective x^T L x.
///
/// Identical to the pairwise form computed by [`edge_smoothness`]; the
/// weight matrix is taken alongside L so callers can check the two routes
/// against each other.
pub fn rayleigh_objective(
    laplacian: &Array2<f64>,
    weights: &Array2<f64>,
    x: &Array1<f64>,
) -> Result<f64> {
    let n = laplacian.nrows();
    if laplacian.ncols() != n || weights.nrows() != n || weights.ncols() != n || x.len() != n {
        return Err(Error::ShapeError(format!(
            "rayleigh objective needs N x N matrices and a length-N vector, got L {} x {}, W {} x {}, x {}",
            laplacian.nrows(),
            laplacian.ncols(),
            weights.nrows(),
            weights.ncols(),
            x.len()
        )));
    }
    Ok(x.dot(&laplacian.dot(x)))
}

/// The pairwise form (1/2) sum_ij (x_i - x_j)^2 W_ij of the smoothness
/// objective, evaluated directly from the weights.
pub fn edge_smoothness(weights: &Array2<f64>, x: &Array1<f64>) -> Result<f64> {
    let n = weights.nrows();
    if weights.ncols() != n || x.len() != n {
        return Err(Error::ShapeError(format!(
            "edge smoothness needs an N x N weight matrix and a length-N vector, got {} x {} and {}",
            weights.nrows(),
            weights.ncols(),
            x.len()
        )));
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = x[i] - x[j];
            s += d * d * weights[[i, j]];
        }
    }
    Ok(0.5 * s)
}

/// Number of eigenvalues at (numerical) zero.
///
/// For a Laplacian spectrum this equals the number of connected components.
/// The default tolerance is 1e-9 of the largest eigenvalue with a floor of
/// 1e-12.
pub fn kernel_multiplicity(spectrum: &Spectrum, tol: Option<f64>) -> usize {
    let lambda_max = spectrum.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let threshold = tol.unwrap_or_else(|| (1e-9 * lambda_max).max(1e-12));
    spectrum
        .eigenvalues
        .iter()
        .filter(|&&v| v <= threshold)
        .count()
}
