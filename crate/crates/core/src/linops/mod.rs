//! Linear operators: dense matrices, the edge-incidence operator used by
//! convex clustering, high-order difference operators, and spectral bounds.

mod banded;
mod difference;
mod edge;
pub mod io;
mod spectral;

pub use banded::BandedCholesky;
pub use difference::{build_difference_operator, DifferenceOperator};
pub use edge::{build_edge_operator, EdgeOperator};
pub use spectral::{gershgorin_bound, power_iteration, PowerEstimate};

use crate::{Matrix, Vector};

/// A linear map `A: R^cols -> R^rows` together with its adjoint.
///
/// Implementations panic when handed a vector of the wrong length; solvers
/// validate shapes once up front.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn apply_adjoint(&self, y: &Vector) -> Vector;

    /// Materializes the operator column by column.
    fn to_dense(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows(), self.cols());
        let mut e = Vector::zeros(self.cols());
        for j in 0..self.cols() {
            e[j] = 1.0;
            out.set_column(j, &self.apply(&e));
            e[j] = 0.0;
        }
        out
    }
}

/// The concrete operators the solvers understand.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Dense(Matrix),
    Identity(usize),
    Zero { rows: usize, cols: usize },
    Edge(EdgeOperator),
    Difference(DifferenceOperator),
}

impl Operator {
    pub fn is_zero(&self) -> bool {
        matches!(self, Operator::Zero { .. })
    }
}

impl LinearOperator for Operator {
    fn rows(&self) -> usize {
        match self {
            Operator::Dense(m) => m.nrows(),
            Operator::Identity(n) => *n,
            Operator::Zero { rows, .. } => *rows,
            Operator::Edge(e) => e.rows(),
            Operator::Difference(d) => d.rows(),
        }
    }

    fn cols(&self) -> usize {
        match self {
            Operator::Dense(m) => m.ncols(),
            Operator::Identity(n) => *n,
            Operator::Zero { cols, .. } => *cols,
            Operator::Edge(e) => e.cols(),
            Operator::Difference(d) => d.cols(),
        }
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.cols(), "operator input length");
        match self {
            Operator::Dense(m) => m * x,
            Operator::Identity(_) => x.clone(),
            Operator::Zero { rows, .. } => Vector::zeros(*rows),
            Operator::Edge(e) => e.apply(x),
            Operator::Difference(d) => d.apply(x),
        }
    }

    fn apply_adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.rows(), "operator adjoint input length");
        match self {
            Operator::Dense(m) => m.tr_mul(y),
            Operator::Identity(_) => y.clone(),
            Operator::Zero { cols, .. } => Vector::zeros(*cols),
            Operator::Edge(e) => e.apply_adjoint(y),
            Operator::Difference(d) => d.apply_adjoint(y),
        }
    }

    fn to_dense(&self) -> Matrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Identity(n) => Matrix::identity(*n, *n),
            Operator::Zero { rows, cols } => Matrix::zeros(*rows, *cols),
            Operator::Edge(e) => e.to_dense(),
            Operator::Difference(d) => d.to_dense(),
        }
    }
}

impl From<Matrix> for Operator {
    fn from(m: Matrix) -> Self {
        Operator::Dense(m)
    }
}

impl From<EdgeOperator> for Operator {
    fn from(e: EdgeOperator) -> Self {
        Operator::Edge(e)
    }
}

impl From<DifferenceOperator> for Operator {
    fn from(d: DifferenceOperator) -> Self {
        Operator::Difference(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn adjoint_gap(op: &dyn LinearOperator, rng: &mut ChaCha8Rng) -> f64 {
        let u = random_vec(rng, op.cols());
        let v = random_vec(rng, op.rows());
        let lhs = op.apply(&u).dot(&v);
        let rhs = u.dot(&op.apply_adjoint(&v));
        (lhs - rhs).abs() / (1.0 + lhs.abs())
    }

    #[test]
    fn adjoint_consistency_all_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dense = Operator::Dense(Matrix::from_fn(4, 6, |i, j| (i as f64) - 0.5 * j as f64));
        let edges = vec![(0, 1), (0, 4), (2, 3), (3, 5), (1, 5)];
        let edge = Operator::Edge(EdgeOperator::new(6, edges, 3).unwrap());
        let ops: Vec<Operator> = vec![
            dense,
            Operator::Identity(5),
            Operator::Zero { rows: 3, cols: 4 },
            edge,
            DifferenceOperator::new(12, 0).unwrap().into(),
            DifferenceOperator::new(12, 1).unwrap().into(),
            DifferenceOperator::new(12, 3).unwrap().into(),
        ];
        for op in &ops {
            for _ in 0..100 {
                assert!(adjoint_gap(op, &mut rng) <= 1e-10, "{op:?}");
            }
        }
    }

    #[test]
    fn to_dense_matches_apply() {
        let op: Operator = DifferenceOperator::new(7, 2).unwrap().into();
        let dense = op.to_dense();
        let x = Vector::from_fn(7, |i, _| (i * i) as f64 - 3.0);
        assert!((dense * &x - op.apply(&x)).norm() < 1e-12);
    }
}
