use super::LinearOperator;
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Discrete difference operator `D^(k+1)` of order `k + 1` on signals of
/// length `n`, mapping `R^n -> R^(n-k-1)`.
///
/// `D^(1)` has rows `(-1, 1)`, so `(D^(1) x)_i = x_{i+1} - x_i`, and
/// `D^(k+1) = D^(1) D^(k)`. Entry `(i, j)` equals
/// `(-1)^(k+1+j-i) * C(k+1, j-i)` for `0 <= j - i <= k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceOperator {
    n: usize,
    k: usize,
}

pub fn build_difference_operator(n: usize, k: usize) -> Result<DifferenceOperator> {
    DifferenceOperator::new(n, k)
}

impl DifferenceOperator {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < k + 2 {
            return Err(Error::param(
                "n",
                format!("difference of order {} needs n >= {}, got {n}", k + 1, k + 2),
            ));
        }
        Ok(Self { n, k })
    }

    pub fn signal_len(&self) -> usize {
        self.n
    }

    /// The order parameter `k`; the operator takes `k + 1` differences.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.k + 1
    }

    /// Row stencil `[(-1)^(k+1) C(k+1,0), ..., C(k+1,k+1)]`.
    pub fn stencil(&self) -> Vec<f64> {
        let m = self.order();
        let mut binom = 1.0f64;
        (0..=m)
            .map(|d| {
                if d > 0 {
                    binom = binom * (m + 1 - d) as f64 / d as f64;
                }
                if (m + d).is_multiple_of(2) {
                    binom
                } else {
                    -binom
                }
            })
            .collect()
    }

    /// Entry `(i, j)` of `shift * I + scale * DᵀD`, zero outside the band
    /// `|i - j| <= k + 1`.
    pub fn gram_entry(&self, i: usize, j: usize, shift: f64, scale: f64) -> f64 {
        let width = self.order();
        let (lo, hi) = (i.min(j), i.max(j));
        let mut acc = 0.0;
        if hi - lo <= width {
            let stencil = self.stencil();
            let first = hi.saturating_sub(width);
            let last = lo.min(self.rows() - 1);
            for s in first..=last {
                acc += stencil[i - s] * stencil[j - s];
            }
        }
        let diag = if i == j { shift } else { 0.0 };
        diag + scale * acc
    }
}

fn first_difference(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

fn first_difference_adjoint(y: &[f64]) -> Vec<f64> {
    let m = y.len();
    let mut out = vec![0.0; m + 1];
    for (i, &v) in y.iter().enumerate() {
        out[i] -= v;
        out[i + 1] += v;
    }
    out
}

impl LinearOperator for DifferenceOperator {
    fn rows(&self) -> usize {
        self.n - self.order()
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.n, "difference operator input length");
        let mut cur = first_difference(x.as_slice());
        for _ in 1..self.order() {
            cur = first_difference(&cur);
        }
        Vector::from_vec(cur)
    }

    fn apply_adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.rows(), "difference operator adjoint input length");
        let mut cur = first_difference_adjoint(y.as_slice());
        for _ in 1..self.order() {
            cur = first_difference_adjoint(&cur);
        }
        Vector::from_vec(cur)
    }

    fn to_dense(&self) -> Matrix {
        let stencil = self.stencil();
        let mut out = Matrix::zeros(self.rows(), self.n);
        for i in 0..self.rows() {
            for (d, &c) in stencil.iter().enumerate() {
                out[(i, i + d)] = c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_difference_matrix(n: usize) -> Matrix {
        Matrix::from_fn(n - 1, n, |i, j| {
            if j == i {
                -1.0
            } else if j == i + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    fn binomial(n: usize, r: usize) -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn first_differences() {
        let d = DifferenceOperator::new(4, 0).unwrap();
        let y = d.apply(&Vector::from_vec(vec![1.0, 2.0, 4.0, 8.0]));
        assert_eq!(y.as_slice(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn second_difference_of_affine_is_zero() {
        let d = DifferenceOperator::new(4, 1).unwrap();
        let y = d.apply(&Vector::from_vec(vec![1.0, 2.0, 3.0, 4.0]));
        assert_eq!(y.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn recursive_product_matches() {
        // D^(2) on n=5 is D^(1)(n=4) * D^(1)(n=5)
        let expected = first_difference_matrix(4) * first_difference_matrix(5);
        let d = DifferenceOperator::new(5, 1).unwrap();
        assert_eq!(d.to_dense(), expected);
        assert_eq!(LinearOperator::to_dense(&Operator::from(d)), expected);
    }

    use crate::linops::Operator;

    #[test]
    fn higher_orders_match_products_and_binomials() {
        for k in 0..4 {
            let n = 9;
            let mut product = first_difference_matrix(n);
            for step in 1..=k {
                product = first_difference_matrix(n - step) * product;
            }
            let d = DifferenceOperator::new(n, k).unwrap();
            let dense = d.to_dense();
            assert_eq!(dense, product, "k = {k}");
            for i in 0..d.rows() {
                for j in 0..n {
                    let expected = if j >= i && j - i <= k + 1 {
                        let sign = if (k + 1 + j - i) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(k + 1, j - i)
                    } else {
                        0.0
                    };
                    assert_eq!(dense[(i, j)], expected);
                }
            }
            // the fast apply agrees with the explicit matrix
            let x = Vector::from_fn(n, |i, _| ((i * 7) % 5) as f64 - 1.5);
            assert!((&dense * &x - d.apply(&x)).norm() < 1e-12);
        }
    }

    #[test]
    fn gram_entries_match_dense() {
        let d = DifferenceOperator::new(8, 2).unwrap();
        let dense = d.to_dense();
        let gram = Matrix::identity(8, 8) * 0.5 + dense.transpose() * &dense * 3.0;
        for i in 0..8 {
            for j in 0..8 {
                assert!((d.gram_entry(i, j, 0.5, 3.0) - gram[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_empty_operator() {
        assert!(DifferenceOperator::new(2, 1).is_err());
        assert!(DifferenceOperator::new(3, 1).is_ok());
        assert!(DifferenceOperator::new(1, 0).is_err());
    }
}
