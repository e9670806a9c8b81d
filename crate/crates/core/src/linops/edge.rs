use std::collections::BTreeSet;

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Edge-incidence operator of an undirected graph.
///
/// Row `(i, j)` has `+1` in column `i` and `-1` in column `j`. The operator
/// acts row-wise on an `n x width` matrix stored row-major in a flat vector,
/// producing the `m x width` matrix of row differences `U[i,:] - U[j,:]`.
/// Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOperator {
    n: usize,
    edges: Vec<(usize, usize)>,
    width: usize,
}

/// Edge operator over scalar node values (`width = 1`).
pub fn build_edge_operator(n: usize, edges: &[(usize, usize)]) -> Result<EdgeOperator> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 nodes, got {n}")));
    }
    EdgeOperator::new(n, edges.to_vec(), 1)
}

impl EdgeOperator {
    /// Validates and sorts the edge list. An empty edge list is allowed.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::param("width", "must be at least 1"));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &edges {
            if i >= j {
                return Err(Error::InvalidEdge(i, j, "expected i < j"));
            }
            if j >= n {
                return Err(Error::InvalidEdge(i, j, "node index out of range"));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge(i, j));
            }
        }
        Ok(Self {
            n,
            edges: seen.into_iter().collect(),
            width,
        })
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// `max_i G_ii` where `G = AᵀA` is the graph Laplacian.
    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// The `n x n` Gram matrix `G = AᵀA` of the scalar (width 1) operator.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            g[(i, i)] += 1.0;
            g[(j, j)] += 1.0;
            g[(i, j)] -= 1.0;
            g[(j, i)] -= 1.0;
        }
        g
    }

    /// Row differences of an `n x width` matrix.
    pub fn apply_rows(&self, u: &Matrix) -> Matrix {
        assert_eq!(u.shape(), (self.n, self.width), "edge operator input shape");
        Matrix::from_fn(self.edges.len(), self.width, |e, c| {
            let (i, j) = self.edges[e];
            u[(i, c)] - u[(j, c)]
        })
    }
}

impl LinearOperator for EdgeOperator {
    fn rows(&self) -> usize {
        self.edges.len() * self.width
    }

    fn cols(&self) -> usize {
        self.n * self.width
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.cols(), "edge operator input length");
        let w = self.width;
        let mut out = Vector::zeros(self.rows());
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            for c in 0..w {
                out[e * w + c] = x[i * w + c] - x[j * w + c];
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.rows(), "edge operator adjoint input length");
        let w = self.width;
        let mut out = Vector::zeros(self.cols());
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            for c in 0..w {
                let v = y[e * w + c];
                out[i * w + c] += v;
                out[j * w + c] -= v;
            }
        }
        out
    }
}
