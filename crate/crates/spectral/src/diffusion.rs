//! Heat diffusion on graphs.
//!
//! The temperature vector evolves by dh/dt = -L h. Two solvers are provided
//! and deliberately share no code, so each can serve as an oracle for the
//! other:
//!
//! - [`step_discrete`] iterates the explicit Euler map
//!   h <- h - dt * (L h), first-order accurate in dt;
//! - [`solve_analytic`] expands h over the eigenmodes of L and applies the
//!   exact decay factors exp(-gamma_u t).
//!
//! In the discrete map mode u is damped by xi_u = 1 - dt * gamma_u per
//! step. All factors stay positive for dt below 1 / gamma_max (see
//! [`max_stable_dt`]); beyond 2 / gamma_max some factor leaves [-1, 1] and
//! the iteration diverges, which is the condition the stability check
//! enforces.

use ndarray::{Array1, Array2};

use crate::eigen::sym_eig;
use crate::error::{Error, Result};

/// Temperatures on the graph nodes at a point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatState {
    pub temperatures: Array1<f64>,
    pub time: f64,
}

impl HeatState {
    pub fn new(temperatures: Array1<f64>, time: f64) -> Self {
        HeatState { temperatures, time }
    }

    /// Initial state at time zero.
    pub fn initial(temperatures: Array1<f64>) -> Self {
        HeatState::new(temperatures, 0.0)
    }
}

/// What to do when the requested step size can diverge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityPolicy {
    /// Fail with [`Error::UnstableStep`].
    Reject,
    /// Run anyway and set the `unstable` flag on the outcome.
    Proceed,
}

/// Discrete evolution result with its stability verdict.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: HeatState,
    /// True when dt was at or beyond the divergence threshold 2 / gamma_max.
    pub unstable: bool,
}

fn check_inputs(l: &Array2<f64>, h0: &HeatState) -> Result<()> {
    let n = l.nrows();
    if l.ncols() != n || h0.temperatures.len() != n {
        return Err(Error::ShapeError(format!(
            "laplacian is {} x {} but the state has {} nodes",
            l.nrows(),
            l.ncols(),
            h0.temperatures.len()
        )));
    }
    if h0.temperatures.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("initial temperatures must be finite".into()));
    }
    Ok(())
}

fn spectral_radius(l: &Array2<f64>) -> Result<f64> {
    let spec = sym_eig(l)?;
    Ok(spec.eigenvalues.iter().copied().fold(0.0f64, f64::max))
}

/// Runs `n_steps` explicit Euler steps of size `dt`, rejecting unstable
/// step sizes.
pub fn step_discrete(
    l: &Array2<f64>,
    h0: &HeatState,
    dt: f64,
    n_steps: usize,
) -> Result<HeatState> {
    Ok(step_discrete_with(l, h0, dt, n_steps, StabilityPolicy::Reject)?.state)
}

/// [`step_discrete`] with an explicit stability policy; under
/// [`StabilityPolicy::Proceed`] an unstable dt is only flagged, not refused.
pub fn step_discrete_with(
    l: &Array2<f64>,
    h0: &HeatState,
    dt: f64,
    n_steps: usize,
    policy: StabilityPolicy,
) -> Result<StepOutcome> {
    check_inputs(l, h0)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidData(format!(
            "step size must be positive and finite, got {dt}"
        )));
    }
    let gamma_max = spectral_radius(l)?;
    let limit = if gamma_max > 0.0 {
        2.0 / gamma_max
    } else {
        f64::INFINITY
    };
    let unstable = dt >= limit;
    if unstable && policy == StabilityPolicy::Reject {
        return Err(Error::UnstableStep { dt, limit });
    }
    let mut h = h0.temperatures.clone();
    for _ in 0..n_steps {
        let flow = l.dot(&h);
        h.zip_mut_with(&flow, |hi, fi| *hi -= dt * fi);
    }
    Ok(StepOutcome {
        state: HeatState::new(h, h0.time + dt * n_steps as f64),
        unstable,
    })
}

/// Exact solution at elapsed time `t`: decompose h0 over the eigenmodes of
/// L and damp mode u by exp(-gamma_u t).
pub fn solve_analytic(l: &Array2<f64>, h0: &HeatState, t: f64) -> Result<HeatState> {
    check_inputs(l, h0)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidData(format!(
            "elapsed time must be nonnegative and finite, got {t}"
        )));
    }
    let spec = sym_eig(l)?;
    let coefficients = spec.eigenvectors.t().dot(&h0.temperatures);
    let damped = Array1::from_iter(
        coefficients
            .iter()
            .zip(spec.eigenvalues.iter())
            .map(|(a, g)| a * (-g * t).exp()),
    );
    let h = spec.eigenvectors.dot(&damped);
    Ok(HeatState::new(h, h0.time + t))
}

/// Per-mode damping factors xi_u = 1 - dt * gamma_u of the discrete map,
/// in ascending eigenvalue order. The kernel mode always has factor 1.
pub fn mode_decay_factors(l: &Array2<f64>, dt: f64) -> Result<Array1<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidData(format!(
            "step size must be positive and finite, got {dt}"
        )));
    }
    let spec = sym_eig(l)?;
    Ok(spec.eigenvalues.mapv(|g| 1.0 - dt * g))
}

/// Largest step size for which every decay factor stays positive,
/// 1 / gamma_max. Returns infinity for the zero Laplacian, whose dynamics
/// are frozen at any step size.
pub fn max_stable_dt(l: &Array2<f64>) -> Result<f64> {
    let gamma_max = spectral_radius(l)?;
    if gamma_max > 0.0 {
        Ok(1.0 / gamma_max)
    } else {
        Ok(f64::INFINITY)
    }
}
