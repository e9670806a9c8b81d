use nalgebra::SymmetricEigen;

use crate::error::{check_len, Error, Result};
use crate::linops::{power_iteration, Operator};
use crate::prox::ProxTerm;
use crate::solvers::{CompositeProblem, QuadraticLoss};
use crate::{Matrix, Vector};

/// `½‖y - Xβ‖² + λ‖β‖₁`.
///
/// With `as_constraint = false` the penalty is `g` and `h ≡ 0` (plain
/// proximal-gradient form). With `as_constraint = true` the penalty moves to
/// `h(Aβ)` with `A = I` and `g ≡ 0`, so the splitting solvers see a real
/// constraint. `L_f = λmax(XᵀX)` is estimated by power iteration.
pub fn build_lasso(x: &Matrix, y: &Vector, lambda: f64, as_constraint: bool) -> Result<CompositeProblem> {
    check_len(y.len(), x.nrows(), "y length vs rows of X")?;
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("X, y", "must be finite"));
    }
    let design = Operator::Dense(x.clone());
    let p = x.ncols();
    let lf = power_iteration(&design, 1e-13, 1_000_000)?.value * (1.0 + 1e-10);
    let mu = SymmetricEigen::new(x.tr_mul(x)).eigenvalues.min().clamp(0.0, lf);
    let f = QuadraticLoss::new(design, y.clone(), lf, mu)?;
    let penalty = ProxTerm::l1(lambda)?;
    if as_constraint {
        CompositeProblem::new(f, ProxTerm::Zero, penalty, Operator::Identity(p), 1.0)
    } else {
        CompositeProblem::new(f, penalty, ProxTerm::Zero, Operator::Zero { rows: p, cols: p }, 0.0)
    }
}
