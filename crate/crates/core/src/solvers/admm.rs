use std::time::Instant;

use nalgebra::{Cholesky, Dyn};

use super::config::SolverConfig;
use super::fista::fista_minimize;
use super::problem::{CompositeProblem, SmoothTerm};
use super::relative_change;
use super::result::{SolverResult, Status, TraceEntry};
use crate::error::{Error, Result};
use crate::linops::{BandedCholesky, LinearOperator, Operator};
use crate::{Matrix, Vector};

const BALANCE_RATIO: f64 = 10.0;
const BALANCE_FACTOR: f64 = 2.0;

/// How ADMM solves its x-subproblem
/// `argmin_x f(x) + g(x) + ν/2 ‖Ax - y + λ/ν‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XUpdate {
    /// `Direct` when `g ≡ 0`, otherwise `InnerFista`.
    #[default]
    Auto,
    /// Solve the normal equations `(MᵀM + νAᵀA) x = Mᵀb + Aᵀ(νy - λ)`.
    /// Requires `g ≡ 0`.
    Direct,
    /// Warm-started FISTA with step `1 / (L_f + ν λ̄)`.
    InnerFista,
}

fn gram(op: &Operator) -> Matrix {
    match op {
        Operator::Identity(n) => Matrix::identity(*n, *n),
        Operator::Zero { cols, .. } => Matrix::zeros(*cols, *cols),
        Operator::Dense(m) => m.tr_mul(m),
        other => {
            let d = other.to_dense();
            d.tr_mul(&d)
        }
    }
}

/// Factorization of `MᵀM + ν AᵀA`.
pub(crate) enum NormalFactor {
    Banded(BandedCholesky),
    /// `I + ν (G ⊗ I_width)` solved one column of the row-major matrix at a time.
    Kron {
        chol: Cholesky<f64, Dyn>,
        width: usize,
    },
    Dense(Cholesky<f64, Dyn>),
}

impl NormalFactor {
    pub(crate) fn new(problem: &CompositeProblem, nu: f64) -> Result<Self> {
        let design = problem.f().design();
        match (design, problem.operator()) {
            (Operator::Identity(n), Operator::Difference(d)) => {
                let chol = BandedCholesky::factor(*n, d.order(), |i, j| d.gram_entry(i, j, 1.0, nu))?;
                Ok(NormalFactor::Banded(chol))
            }
            (Operator::Identity(_), Operator::Edge(e)) => {
                let m = Matrix::identity(e.nodes(), e.nodes()) + e.gram() * nu;
                let chol = Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?;
                Ok(NormalFactor::Kron { chol, width: e.width() })
            }
            (design, a) => {
                let m = gram(design) + gram(a) * nu;
                let chol = Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?;
                Ok(NormalFactor::Dense(chol))
            }
        }
    }

    pub(crate) fn solve(&self, rhs: &Vector) -> Vector {
        match self {
            NormalFactor::Banded(c) => c.solve(rhs),
            NormalFactor::Dense(c) => c.solve(rhs),
            NormalFactor::Kron { chol, width } => {
                let n = rhs.len() / width;
                let block = Matrix::from_row_slice(n, *width, rhs.as_slice());
                let sol = chol.solve(&block);
                Vector::from_iterator(rhs.len(), sol.transpose().iter().copied())
            }
        }
    }
}

/// ADMM on `min f(x) + g(x) + h(y)` subject to `Ax = y`.
///
/// Starts from `x0`, `y = A x0`, `λ = 0`. Each iteration updates x (see
/// [`XUpdate`]), then `y ← prox_{h/ν}(Ax + λ/ν)` and `λ ← λ + ν(Ax - y)`.
/// The penalty starts at `nu_init` and is balanced against the residuals:
/// doubled when the primal residual `r = Ax - y` exceeds ten times the dual
/// residual `s = ν Aᵀ(y - y_prev)`, halved in the opposite case, and kept in
/// `[nu_init / nu_max, nu_max]`. The direct x-update is refactored whenever ν
/// changes. Converged when `‖r‖ / max(1, ‖y‖)`, `‖s‖ / max(1, ‖Aᵀλ‖)` and the
/// relative change in `x` are all at most `outer_tol`.
pub fn admm(problem: &CompositeProblem, x_update: XUpdate, config: &SolverConfig, x0: &Vector) -> Result<SolverResult> {
    config.validate()?;
    problem.check_x(x0)?;

    let direct = match x_update {
        XUpdate::Auto => problem.g().is_zero(),
        XUpdate::Direct if !problem.g().is_zero() => {
            return Err(Error::Unsupported("direct x-update requires g ≡ 0".to_string()))
        }
        XUpdate::Direct => true,
        XUpdate::InnerFista => false,
    };

    let start = Instant::now();
    let mut nu = config.nu_init;
    let a = problem.operator();
    let f = problem.f();
    let g = problem.g();
    let h = problem.h();
    let mut factor = if direct {
        Some(NormalFactor::new(problem, nu)?)
    } else {
        None
    };
    let f_rhs = f.design().apply_adjoint(f.target());
    let step_for = |nu: f64| 1.0 / (f.lipschitz() + nu * problem.spectral_bound());

    let mut x = x0.clone();
    let mut y = a.apply(&x);
    let mut lambda = Vector::zeros(problem.dual_dim());
    let mut trace = Vec::new();
    let mut status = Status::MaxIters;

    for k in 1..=config.outer_max {
        // c = y - λ/ν; the x-step fits Ax to c
        let c = &y - &lambda / nu;
        let (x_next, inner_iters, inner_ok) = match &factor {
            Some(fac) => (fac.solve(&(&f_rhs + a.apply_adjoint(&(&c * nu)))), 1, true),
            None => {
                let out = fista_minimize(
                    |z| f.value(z) + g.value(z) + 0.5 * nu * (a.apply(z) - &c).norm_squared(),
                    |z| f.gradient(z) + a.apply_adjoint(&(a.apply(z) - &c)) * nu,
                    |v, t| g.prox(v, t).expect("shapes validated"),
                    &x,
                    step_for(nu),
                    true,
                    config.inner_tol,
                    config.inner_max,
                    |_, _, _| {},
                );
                (out.x, out.iterations, out.converged)
            }
        };

        let ax = a.apply(&x_next);
        let y_next = h.prox(&(&ax + &lambda / nu), 1.0 / nu)?;
        let mut w = ax.clone() * nu;
        w += &lambda;
        lambda = h.prox_conjugate(&w, nu)?;

        let primal = (&ax - &y_next).norm();
        let dual = a.apply_adjoint(&(&y_next - &y)).norm() * nu;
        let residual = primal / y_next.norm().max(1.0);
        let dual_residual = dual / a.apply_adjoint(&lambda).norm().max(1.0);
        let x_change = relative_change(&x_next, &x);
        x = x_next;
        y = y_next;

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
        if residual <= config.outer_tol && dual_residual <= config.outer_tol && x_change <= config.outer_tol {
            status = Status::Converged;
            break;
        }
        let nu_next = if primal > BALANCE_RATIO * dual {
            (nu * BALANCE_FACTOR).min(config.nu_max)
        } else if dual > BALANCE_RATIO * primal {
            (nu / BALANCE_FACTOR).max(config.nu_init / config.nu_max)
        } else {
            nu
        };
        if nu_next != nu {
            nu = nu_next;
            if factor.is_some() {
                factor = Some(NormalFactor::new(problem, nu)?);
            }
        }
    }

    Ok(SolverResult {
        x,
        lambda,
        trace,
        status,
    })
}
