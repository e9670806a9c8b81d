use std::time::Instant;

use nalgebra::{Cholesky, Dyn};

use super::config::SolverConfig;
use super::fista::fista_minimize;
use super::problem::{CompositeProblem, SmoothTerm};
use super::relative_change;
use super::result::{SolverResult, Status, TraceEntry};
use crate::error::{Error, Result};
use crate::linops::{LinearOperator, Operator};
use crate::Vector;

enum XStep {
    /// `f = ½‖x - b‖²`: `x = prox_g(b - Aᵀλ)`.
    Prox,
    /// `g ≡ 0`: `MᵀM x = Mᵀb - Aᵀλ`.
    Normal(Cholesky<f64, Dyn>),
    Inner,
}

/// Alternating minimization: ADMM with the x-step taken on the ordinary
/// Lagrangian, `x ← argmin_x f(x) + g(x) + ⟨λ, Ax⟩`.
///
/// Requires `f` strongly convex with modulus `μ > 0`. The penalty is fixed at
/// `ama_penalty`, or `μ / operator_spectral_bound` when unset, which keeps the
/// dual step below `2μ / λmax(AᵀA)`.
pub fn ama(problem: &CompositeProblem, config: &SolverConfig, x0: &Vector) -> Result<SolverResult> {
    config.validate()?;
    problem.check_x(x0)?;
    let f = problem.f();
    let mu = f.strong_convexity();
    if !(mu > 0.0) {
        return Err(Error::Unsupported(
            "AMA requires a strongly convex smooth term".to_string(),
        ));
    }
    let nu = config.ama_penalty.unwrap_or_else(|| {
        if problem.spectral_bound() > 0.0 {
            mu / problem.spectral_bound()
        } else {
            config.nu_init
        }
    });

    let a = problem.operator();
    let g = problem.g();
    let h = problem.h();
    let x_step = match f.design() {
        Operator::Identity(_) => XStep::Prox,
        design if g.is_zero() => {
            let m = design.to_dense();
            XStep::Normal(Cholesky::new(m.tr_mul(&m)).ok_or(Error::NotPositiveDefinite)?)
        }
        _ => XStep::Inner,
    };
    let f_rhs = f.design().apply_adjoint(f.target());

    let start = Instant::now();
    let mut x = x0.clone();
    let mut lambda = Vector::zeros(problem.dual_dim());
    let mut trace = Vec::new();
    let mut status = Status::MaxIters;

    for k in 1..=config.outer_max {
        let at_lambda = a.apply_adjoint(&lambda);
        let (x_next, inner_iters, inner_ok) = match &x_step {
            XStep::Prox => (g.prox(&(&f_rhs - &at_lambda), 1.0)?, 1, true),
            XStep::Normal(chol) => (chol.solve(&(&f_rhs - &at_lambda)), 1, true),
            XStep::Inner => {
                let out = fista_minimize(
                    |z| f.value(z) + g.value(z) + at_lambda.dot(z),
                    |z| f.gradient(z) + &at_lambda,
                    |v, t| g.prox(v, t).expect("shapes validated"),
                    &x,
                    1.0 / f.lipschitz(),
                    true,
                    config.inner_tol,
                    config.inner_max,
                    |_, _, _| {},
                );
                (out.x, out.iterations, out.converged)
            }
        };

        let ax = a.apply(&x_next);
        let y = h.prox(&(&ax + &lambda / nu), 1.0 / nu)?;
        let mut w = ax.clone() * nu;
        w += &lambda;
        lambda = h.prox_conjugate(&w, nu)?;

        let residual = (&ax - &y).norm() / y.norm().max(1.0);
        let x_change = relative_change(&x_next, &x);
        x = x_next;

        let objective = problem.objective(&x);
        trace.push(TraceEntry {
            outer_iter: k,
            inner_iters,
            objective,
            primal_residual: residual,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            inner_converged: inner_ok,
        });
        if !objective.is_finite() {
            status = Status::Diverged;
            break;
        }
        if residual <= config.outer_tol && x_change <= config.outer_tol {
            status = Status::Converged;
            break;
        }
    }

    Ok(SolverResult {
        x,
        lambda,
        trace,
        status,
    })
}
