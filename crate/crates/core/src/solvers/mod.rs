//! Solver engines for `min f(x) + g(x) + h(Ax)`.
//!
//! * [`proximal_gradient`]: ISTA / FISTA for `h ≡ 0`.
//! * [`admm`]: alternating x, y and multiplier updates on the augmented
//!   Lagrangian of `Ax = y`.
//! * [`ama`]: ADMM with the x-step taken on the plain Lagrangian.
//! * [`solve_proposed`]: the method of multipliers with the joint (x, y)
//!   minimization done by FISTA on the smooth envelope `φ₁`.

mod admm;
mod ama;
mod config;
mod fista;
mod problem;
mod proposed;
mod result;

pub use admm::{admm, XUpdate};
pub use ama::ama;
pub use config::{EtaMode, SolverConfig};
pub use fista::{alpha_sequence, fista_minimize, proximal_gradient, FistaOutcome};
pub use problem::{CompositeProblem, QuadraticLoss, SmoothTerm};
pub use proposed::{grad_phi1, inner_step_size, lipschitz_upper_bound, phi1, solve_proposed, Envelope};
pub use result::{SolverResult, Status, TraceEntry};

use crate::Vector;

/// `‖a - b‖ / max(1, ‖a‖)`.
pub(crate) fn relative_change(new: &Vector, old: &Vector) -> f64 {
    (new - old).norm() / new.norm().max(1.0)
}
