use std::time::Instant;

use super::config::{EtaMode, SolverConfig};
use super::fista::fista_minimize;
use super::problem::{CompositeProblem, SmoothTerm};
use super::relative_change;
use super::result::{SolverResult, Status, TraceEntry};
use crate::error::{Error, Result};
use crate::linops::LinearOperator;
use crate::Vector;

/// The smooth envelope `φ₁(x) = f(x) + min_y { h(y) + ⟨λ, Ax - y⟩ + ν/2 ‖Ax - y‖² }`
/// for a fixed multiplier `λ` and penalty `ν`.
#[derive(Debug, Clone, Copy)]
pub struct Envelope<'a> {
    problem: &'a CompositeProblem,
    lambda: &'a Vector,
    nu: f64,
}

impl<'a> Envelope<'a> {
    pub fn new(problem: &'a CompositeProblem, lambda: &'a Vector, nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::param("nu", format!("must be finite and > 0, got {nu}")));
        }
        problem.check_lambda(lambda)?;
        Ok(Self { problem, lambda, nu })
    }

    /// The inner minimizer `y*(x) = prox_{h/ν}(Ax + λ/ν)`.
    pub fn minimizer_y(&self, x: &Vector) -> Vector {
        self.y_from_ax(&self.problem.operator().apply(x))
    }

    fn y_from_ax(&self, ax: &Vector) -> Vector {
        let v = ax + self.lambda / self.nu;
        self.problem
            .h()
            .prox(&v, 1.0 / self.nu)
            .expect("shapes validated at construction")
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let ax = self.problem.operator().apply(x);
        let y = self.y_from_ax(&ax);
        let r = ax - &y;
        self.problem.f().value(x) + self.problem.h().value(&y) + self.lambda.dot(&r) + 0.5 * self.nu * r.norm_squared()
    }

    /// `∇f(x) + Aᵀ prox_{νh*}(νAx + λ)`.
    pub fn gradient(&self, x: &Vector) -> Vector {
        let a = self.problem.operator();
        let mut w = a.apply(x);
        w *= self.nu;
        w += self.lambda;
        let dual = self
            .problem
            .h()
            .prox_conjugate(&w, self.nu)
            .expect("shapes validated at construction");
        self.problem.f().gradient(x) + a.apply_adjoint(&dual)
    }
}

/// Gradient of the envelope `φ₁` at `x` for multiplier `lambda` and penalty `nu`.
pub fn grad_phi1(problem: &CompositeProblem, x: &Vector, lambda: &Vector, nu: f64) -> Result<Vector> {
    problem.check_x(x)?;
    Ok(Envelope::new(problem, lambda, nu)?.gradient(x))
}

/// Value of the envelope `φ₁`, evaluated through the explicit minimizer `y*(x)`.
pub fn phi1(problem: &CompositeProblem, x: &Vector, lambda: &Vector, nu: f64) -> Result<f64> {
    problem.check_x(x)?;
    Ok(Envelope::new(problem, lambda, nu)?.value(x))
}

/// `L_f + ν · operator_spectral_bound`, a Lipschitz constant of `∇φ₁`.
pub fn lipschitz_upper_bound(problem: &CompositeProblem, nu: f64) -> f64 {
    problem.f().lipschitz() + nu * problem.spectral_bound()
}

/// Inner FISTA step for penalty `nu`.
pub fn inner_step_size(problem: &CompositeProblem, nu: f64, mode: EtaMode) -> f64 {
    let bound = match mode {
        EtaMode::Safe => problem.spectral_bound(),
        EtaMode::Experiment => problem.experiment_bound().unwrap_or(problem.spectral_bound()),
    };
    let l = problem.f().lipschitz() + nu * bound;
    if l > 0.0 {
        1.0 / l
    } else {
        1.0
    }
}

/// Method of multipliers with FISTA inner solves.
///
/// Outer iteration `k`:
/// 1. `x ← argmin φ₁(x) + g(x)` by FISTA warm-started at the previous `x`,
///    with step `1 / (L_f + ν_k λ̄)`;
/// 2. `λ ← prox_{ν_k h*}(λ + ν_k A x)`;
/// 3. `ν_{k+1} ← min(growth ν_k, ν_max)`.
///
/// `y` is never stored; the residual is measured against `y*(x)` computed with
/// the multiplier that produced `x`. Converged when the scaled residual
/// `‖Ax - y*‖ / max(1, ‖y*‖)` and the relative change in `x` are both at most
/// `outer_tol`.
pub fn solve_proposed(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &Vector,
    lambda0: &Vector,
) -> Result<SolverResult> {
    config.validate()?;
    problem.check_x(x0)?;
    problem.check_lambda(lambda0)?;

    let start = Instant::now();
    let a = problem.operator();
    let g = problem.g();
    let mut x = x0.clone();
    let mut lambda = lambda0.clone();
    let mut nu = config.nu_init;
    let mut trace = Vec::new();
    let mut status = Status::MaxIters;

    for k in 1..=config.outer_max {
        let env = Envelope::new(problem, &lambda, nu)?;
        let step = inner_step_size(problem, nu, config.eta_mode);
        let inner = fista_minimize(
            |z| env.value(z) + g.value(z),
            |z| env.gradient(z),
            |v, t| g.prox(v, t).expect("shapes validated"),
            &x,
            step,
            true,
            config.inner_tol,
            config.inner_max,
            |_, _, _| {},
        );

        let ax = a.apply(&inner.x);
        let y = env.y_from_ax(&ax);
        let residual = (&ax - &y).norm() / y.norm().max(1.0);
        let x_change = relative_change(&inner.x, &x);

        let mut w = ax;
        w *= nu;
        w += &lambda;
        let lambda_next = problem.h().prox_conjugate(&w, nu)?;

        x = inner.x;
        lambda = lambda_next;
        let objective = problem.objective(&x);
        trace.push(TraceEntry {
            outer_iter: k,
            inner_iters: inner.iterations,
            objective,
            primal_residual: residual,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            inner_converged: inner.converged,
        });
        if inner.diverged || !objective.is_finite() {
            status = Status::Diverged;
            break;
        }
        if residual <= config.outer_tol && x_change <= config.outer_tol {
            status = Status::Converged;
            break;
        }
        nu = config.next_nu(nu);
    }

    Ok(SolverResult {
        x,
        lambda,
        trace,
        status,
    })
}
