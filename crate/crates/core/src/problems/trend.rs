use crate::error::{Error, Result};
use crate::linops::{DifferenceOperator, LinearOperator};
use crate::prox::ProxTerm;
use crate::solvers::{CompositeProblem, QuadraticLoss};
use crate::Vector;

/// `min_x ½‖y - x‖² + γ ‖D^(k+1) x‖₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendFilterSpec {
    pub y: Vector,
    pub k: usize,
    pub gamma: f64,
}

impl TrendFilterSpec {
    pub fn new(y: Vector, k: usize, gamma: f64) -> Self {
        Self { y, k, gamma }
    }
}

/// `f = ½‖y - x‖²`, `g ≡ 0`, `h = γ‖·‖₁`, `A = D^(k+1)`, with the spectral
/// bound `λmax(DᵀD) <= 4^(k+1)`. Since `g ≡ 0` the inner solver reduces to
/// accelerated gradient descent.
pub fn build_trend_filter(spec: &TrendFilterSpec) -> Result<CompositeProblem> {
    if !(spec.gamma >= 0.0) || !spec.gamma.is_finite() {
        return Err(Error::param(
            "gamma",
            format!("must be finite and >= 0, got {}", spec.gamma),
        ));
    }
    let d = DifferenceOperator::new(spec.y.len(), spec.k)?;
    CompositeProblem::new(
        QuadraticLoss::identity(spec.y.clone()),
        ProxTerm::Zero,
        ProxTerm::L1(spec.gamma),
        d.into(),
        4f64.powi(spec.k as i32 + 1),
    )
}

/// Direct evaluation of the trend filtering objective.
pub fn tf_objective(spec: &TrendFilterSpec, x: &Vector) -> Result<f64> {
    let d = DifferenceOperator::new(spec.y.len(), spec.k)?;
    Ok(0.5 * (&spec.y - x).norm_squared() + spec.gamma * d.apply(x).lp_norm(1))
}

/// `1 / (1 + ν 4^(k+1))`.
pub fn tf_step_size(nu: f64, k: usize) -> f64 {
    1.0 / (1.0 + nu * 4f64.powi(k as i32 + 1))
}
