//! First-order solvers for composite convex problems
//!
//! ```text
//! minimize  f(x) + g(x) + h(A x)
//! ```
//!
//! where `f` is smooth with a Lipschitz gradient and `g`, `h` have cheap
//! proximal maps. The main solver ([`solvers::solve_proposed`]) runs the
//! method of multipliers on the constrained form `A x = y`, eliminating `y`
//! in closed form and minimizing the resulting smooth envelope with FISTA.
//! ADMM, AMA and plain ISTA/FISTA are provided as baselines.
//!
//! Two applications are built in: sparse convex clustering and
//! ℓ1 trend filtering (see [`problems`]).

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linops;
pub mod problems;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};
pub use linops::{DifferenceOperator, EdgeOperator, LinearOperator, Operator};
pub use prox::{GroupStructure, ProxTerm};
pub use solvers::{
    CompositeProblem, EtaMode, QuadraticLoss, SmoothTerm, SolverConfig, SolverResult, Status, TraceEntry,
};

/// Dense column vector used by every solver.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
