use std::time::Instant;

use super::problem::SmoothTerm;
use super::result::{SolverResult, Status, TraceEntry};
use crate::error::{check_len, Error, Result};
use crate::prox::ProxTerm;
use crate::Vector;

#[derive(Debug, Clone)]
pub struct FistaOutcome {
    pub x: Vector,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
}

/// The momentum sequence `α₁ = 1`, `α_{j+1} = (1 + √(1 + 4α_j²)) / 2`.
pub fn alpha_sequence(len: usize) -> Vec<f64> {
    std::iter::successors(Some(1.0f64), |a| Some(0.5 * (1.0 + (1.0 + 4.0 * a * a).sqrt())))
        .take(len)
        .collect()
}

/// Proximal gradient iterations on `objective = smooth + nonsmooth`.
///
/// Each step is `z_j = prox(u_j - step ∇(u_j), step)`. With `accelerated` the
/// extrapolation `u_{j+1} = z_j + ((α_j - 1)/α_{j+1})(z_j - z_{j-1})` is
/// applied, otherwise `u_{j+1} = z_j`. Stops once
/// `|F(z_j) - F(z_{j-1})| <= tol |F(z_{j-1})|` (with `z_0 = x0`) or after
/// `max_iters` steps. `observe` sees every `(j, F(z_j), z_j)`.
#[allow(clippy::too_many_arguments)]
pub fn fista_minimize(
    objective: impl Fn(&Vector) -> f64,
    gradient: impl Fn(&Vector) -> Vector,
    prox: impl Fn(&Vector, f64) -> Vector,
    x0: &Vector,
    step: f64,
    accelerated: bool,
    tol: f64,
    max_iters: usize,
    mut observe: impl FnMut(usize, f64, &Vector),
) -> FistaOutcome {
    let mut z_prev = x0.clone();
    let mut u = x0.clone();
    let mut alpha = 1.0f64;
    let mut f_prev = objective(x0);

    for j in 1..=max_iters {
        let mut grad = gradient(&u);
        grad.axpy(1.0, &u, -step);
        let z = prox(&grad, step);
        let f = objective(&z);
        observe(j, f, &z);
        if !f.is_finite() {
            return FistaOutcome {
                x: z,
                objective: f,
                iterations: j,
                converged: false,
                diverged: true,
            };
        }
        if accelerated {
            let alpha_next = 0.5 * (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt());
            let beta = (alpha - 1.0) / alpha_next;
            u = &z + (&z - &z_prev) * beta;
            alpha = alpha_next;
        } else {
            u.copy_from(&z);
        }
        let done = (f - f_prev).abs() <= tol * f_prev.abs().max(f64::MIN_POSITIVE);
        z_prev = z;
        f_prev = f;
        if done {
            return FistaOutcome {
                x: z_prev,
                objective: f,
                iterations: j,
                converged: true,
                diverged: false,
            };
        }
    }
    FistaOutcome {
        x: z_prev,
        objective: f_prev,
        iterations: max_iters,
        converged: false,
        diverged: false,
    }
}

/// ISTA (`accelerated = false`) or FISTA for `min f(x) + g(x)`.
///
/// Requires `0 < eta <= 1 / L_f`. Every iteration is recorded in the trace.
pub fn proximal_gradient(
    f: &dyn SmoothTerm,
    g: &ProxTerm,
    x0: &Vector,
    eta: f64,
    accelerated: bool,
    tol: f64,
    max_iters: usize,
) -> Result<SolverResult> {
    check_len(x0.len(), f.dim(), "x0")?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("x0", "must be finite"));
    }
    let lf = f.lipschitz();
    if !(eta > 0.0) || eta * lf > 1.0 + 1e-12 {
        return Err(Error::param("eta", format!("need 0 < eta <= 1/L_f = {}", 1.0 / lf)));
    }
    if !(tol >= 0.0) {
        return Err(Error::param("tol", "must be >= 0"));
    }
    if let ProxTerm::Group(s) = g {
        check_len(s.dim(), f.dim(), "g groups vs dim(x)")?;
    }

    let start = Instant::now();
    let mut trace = Vec::new();
    let outcome = fista_minimize(
        |x| f.value(x) + g.value(x),
        |x| f.gradient(x),
        |v, t| g.prox(v, t).expect("step and shape validated"),
        x0,
        eta,
        accelerated,
        tol,
        max_iters,
        |j, obj, _| {
            trace.push(TraceEntry {
                outer_iter: j,
                inner_iters: 1,
                objective: obj,
                primal_residual: 0.0,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                inner_converged: true,
            })
        },
    );
    if trace.is_empty() {
        trace.push(TraceEntry {
            outer_iter: 0,
            inner_iters: 0,
            objective: f.value(x0) + g.value(x0),
            primal_residual: 0.0,
            wall_ms: 0.0,
            inner_converged: true,
        });
    }
    let status = if outcome.diverged {
        Status::Diverged
    } else if outcome.converged {
        Status::Converged
    } else {
        Status::MaxIters
    };
    Ok(SolverResult {
        x: outcome.x,
        lambda: Vector::zeros(0),
        trace,
        status,
    })
}
