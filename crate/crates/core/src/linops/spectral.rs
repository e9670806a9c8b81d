use super::LinearOperator;
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Relative perturbation added to the first coordinate of the all-ones start
/// vector so the iteration never starts orthogonal to the top eigenvector.
const START_PERTURBATION: f64 = 1e-3;

const SYMMETRY_TOL: f64 = 1e-12;

/// Gershgorin upper bound `max_i (g_ii + sum_{j != i} |g_ij|)` on the largest
/// eigenvalue of a symmetric matrix.
pub fn gershgorin_bound(g: &Matrix) -> Result<f64> {
    let (r, c) = g.shape();
    if r != c {
        return Err(Error::NotSquare(r, c));
    }
    let asym = (g - g.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok((0..r)
        .map(|i| {
            let off: f64 = (0..c).filter(|&j| j != i).map(|j| g[(i, j)].abs()).sum();
            g[(i, i)] + off
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    /// Estimate of `λmax(AᵀA)`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimates `λmax(AᵀA)` by power iteration on `AᵀA`.
///
/// Stops when the Rayleigh quotient changes by at most `tol` relative. If
/// `max_iters` is exhausted the last estimate is returned with
/// `converged = false`.
pub fn power_iteration(op: &dyn LinearOperator, tol: f64, max_iters: usize) -> Result<PowerEstimate> {
    let n = op.cols();
    if n == 0 {
        return Err(Error::param("op", "operator has no columns"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let mut v = Vector::from_element(n, 1.0 / (n as f64).sqrt());
    v[0] += START_PERTURBATION;
    v /= v.norm();

    let mut estimate = 0.0;
    for it in 1..=max_iters {
        let w = op.apply_adjoint(&op.apply(&v));
        let rayleigh = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(PowerEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        let change = (rayleigh - estimate).abs();
        estimate = rayleigh;
        v = w / norm;
        if it > 1 && change <= tol * rayleigh.abs() {
            return Ok(PowerEstimate {
                value: estimate,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(PowerEstimate {
        value: estimate,
        iterations: max_iters,
        converged: false,
    })
}
