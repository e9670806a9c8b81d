use std::collections::BTreeSet;

use crate::error::{check_len, Error, Result};
use crate::linops::EdgeOperator;
use crate::prox::{GroupStructure, ProxTerm};
use crate::solvers::{CompositeProblem, EtaMode, QuadraticLoss};
use crate::{Matrix, Vector};

/// Edge list with one weight per edge.
pub type WeightedEdges = (Vec<(usize, usize)>, Vec<f64>);

/// Sparse convex clustering of the rows of `data` (`n x p`):
///
/// ```text
/// min_U ½‖X - U‖_F² + γ₁ Σ_{(i,j)∈E} w_ij ‖U_i· - U_j·‖₂ + γ₂ Σ_j r_j ‖u_j‖₂
/// ```
///
/// Edges are 0-based pairs `i < j`; pairs with zero weight are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SccSpec {
    pub data: Matrix,
    pub gamma1: f64,
    pub gamma2: f64,
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub column_weights: Vec<f64>,
}

impl SccSpec {
    /// Spec with unit column weights.
    pub fn new(data: Matrix, gamma1: f64, gamma2: f64, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Self {
        let p = data.ncols();
        Self {
            data,
            gamma1,
            gamma2,
            edges,
            weights,
            column_weights: vec![1.0; p],
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    /// Positive-weight edges with their weights, sorted.
    fn active_edges(&self) -> Result<WeightedEdges> {
        check_len(self.weights.len(), self.edges.len(), "one weight per edge")?;
        check_len(self.column_weights.len(), self.cols(), "one weight per column")?;
        for (name, v) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if let Some(w) = self.weights.iter().chain(&self.column_weights).find(|w| !(**w >= 0.0)) {
            return Err(Error::param("weights", format!("must be >= 0, got {w}")));
        }
        let mut pairs: Vec<((usize, usize), f64)> = self
            .edges
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .filter(|(_, w)| *w > 0.0)
            .collect();
        pairs.sort_by_key(|&(edge, _)| edge);
        Ok(pairs.into_iter().unzip())
    }
}

/// Row-major flattening of an `n x p` matrix.
pub fn flatten_rows(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.transpose().iter().copied())
}

pub fn unflatten_rows(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_slice(rows, cols, v.as_slice())
}

/// Number of columns that are exactly zero.
pub fn zero_columns(u: &Matrix) -> usize {
    u.column_iter().filter(|c| c.iter().all(|v| *v == 0.0)).count()
}

/// Symmetrized k-nearest-neighbour graph with Gaussian kernel weights
/// `w_ij = v_i exp(-φ ‖X_i· - X_j·‖²)` for `i < j`.
///
/// A pair is kept when either endpoint is among the other's `k` nearest rows
/// (distance ties go to the lower index) and its weight is positive.
pub fn knn_gaussian_weights(x: &Matrix, k: usize, phi: f64, v: &[f64]) -> Result<WeightedEdges> {
    let n = x.nrows();
    if k == 0 || k >= n {
        return Err(Error::param(
            "k",
            format!("need 1 <= k <= n - 1 = {}, got {k}", n.saturating_sub(1)),
        ));
    }
    if !(phi >= 0.0) {
        return Err(Error::param("phi", format!("must be >= 0, got {phi}")));
    }
    check_len(v.len(), n, "one scale per point")?;

    let sq_dist = |i: usize, j: usize| (x.row(i) - x.row(j)).norm_squared();
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (sq_dist(i, j), j)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in others.iter().take(k) {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let mut edges = Vec::with_capacity(pairs.len());
    let mut weights = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let w = v[i] * (-phi * sq_dist(i, j)).exp();
        if w > 0.0 {
            edges.push((i, j));
            weights.push(w);
        }
    }
    Ok((edges, weights))
}

/// `f = ½‖X - U‖_F²` (`L_f = 1`), `g = γ₂ Σ r_j ‖u_j‖` over columns,
/// `h = γ₁ Σ w_ij ‖v_ij‖` over edge rows, `A = A_E` acting on the row-major
/// flattening of `U`.
///
/// The spectral bound is `2 max_i G_ii` with `G = A_EᵀA_E`, whose diagonal
/// is the node degree; the experiment bound is `max_i G_ii`.
pub fn build_scc(spec: &SccSpec) -> Result<CompositeProblem> {
    let (n, p) = (spec.rows(), spec.cols());
    let (edges, weights) = spec.active_edges()?;
    let a = EdgeOperator::new(n, edges, p)?;
    let g_diag_max = a.max_degree() as f64;

    let g = ProxTerm::Group(GroupStructure::column_blocks(
        n,
        spec.column_weights.iter().map(|r| spec.gamma2 * r).collect(),
    )?);
    let h = ProxTerm::Group(GroupStructure::row_blocks(
        p,
        weights.iter().map(|w| spec.gamma1 * w).collect(),
    )?);
    let f = QuadraticLoss::identity(flatten_rows(&spec.data));
    Ok(CompositeProblem::new(f, g, h, a.into(), 2.0 * g_diag_max)?.with_experiment_bound(g_diag_max))
}

/// Direct evaluation of the clustering objective at `U`.
pub fn scc_objective(spec: &SccSpec, u: &Matrix) -> f64 {
    let fit = 0.5 * (&spec.data - u).norm_squared();
    let fusion: f64 = spec
        .edges
        .iter()
        .zip(&spec.weights)
        .map(|(&(i, j), w)| w * (u.row(i) - u.row(j)).norm())
        .sum();
    let sparsity: f64 = u
        .column_iter()
        .zip(&spec.column_weights)
        .map(|(c, r)| r * c.norm())
        .sum();
    fit + spec.gamma1 * fusion + spec.gamma2 * sparsity
}

/// Inner step `1 / (1 + 2ν max G_ii)` (safe) or `1 / (1 + ν max G_ii)`
/// (experiment).
pub fn scc_step_size(nu: f64, g_diag_max: f64, mode: EtaMode) -> f64 {
    match mode {
        EtaMode::Safe => 1.0 / (1.0 + 2.0 * nu * g_diag_max),
        EtaMode::Experiment => 1.0 / (1.0 + nu * g_diag_max),
    }
}
