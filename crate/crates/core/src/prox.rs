//! Proximal maps of the nonsmooth terms, plus their conjugates.
//!
//! For a closed convex `s` and `t > 0`,
//! `prox_{t s}(v) = argmin_x { t s(x) + ½‖v - x‖² }`. The conjugate map
//! `prox_{t s*}` is obtained from the primal one through Moreau's
//! decomposition `prox_{γ s}(z) + γ prox_{s*/γ}(z/γ) = z`; for the norms used
//! here it is a projection onto a dual-norm ball and is evaluated directly.

use crate::error::{check_len, Error, Result};
use crate::Vector;

/// Disjoint coordinate groups with one nonnegative weight each.
///
/// Coordinates outside every group are not penalized.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStructure {
    dim: usize,
    groups: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl GroupStructure {
    pub fn new(dim: usize, groups: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        check_len(weights.len(), groups.len(), "one weight per group")?;
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::param("weights", format!("must be finite and >= 0, got {w}")));
        }
        let mut owner = vec![false; dim];
        for g in &groups {
            for &i in g {
                if i >= dim {
                    return Err(Error::param("groups", format!("index {i} out of range {dim}")));
                }
                if std::mem::replace(&mut owner[i], true) {
                    return Err(Error::param("groups", format!("index {i} in two groups")));
                }
            }
        }
        Ok(Self { dim, groups, weights })
    }

    /// Consecutive blocks of `width` coordinates, one per weight. This is
    /// the row structure of a row-major `weights.len() x width` matrix.
    pub fn row_blocks(width: usize, weights: Vec<f64>) -> Result<Self> {
        let groups = (0..weights.len())
            .map(|b| (b * width..(b + 1) * width).collect())
            .collect();
        Self::new(width * weights.len(), groups, weights)
    }

    /// Column groups of a row-major `rows x weights.len()` matrix.
    pub fn column_blocks(rows: usize, weights: Vec<f64>) -> Result<Self> {
        let cols = weights.len();
        let groups = (0..cols).map(|j| (0..rows).map(|i| i * cols + j).collect()).collect();
        Self::new(rows * cols, groups, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    fn block_norm(&self, b: usize, v: &Vector) -> f64 {
        self.groups[b].iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
    }
}

/// A convex term with a closed-form proximal map.
#[derive(Debug, Clone, PartialEq)]
pub enum ProxTerm {
    /// The zero function.
    Zero,
    /// `w ‖x‖₁`.
    L1(f64),
    /// `Σ_b w_b ‖x_b‖₂` over the groups of the structure.
    Group(GroupStructure),
}

impl ProxTerm {
    pub fn l1(weight: f64) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::param("weight", format!("must be finite and >= 0, got {weight}")));
        }
        Ok(ProxTerm::L1(weight))
    }

    /// True when the term is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            ProxTerm::Zero => true,
            ProxTerm::L1(w) => *w == 0.0,
            ProxTerm::Group(s) => s.weights.iter().all(|w| *w == 0.0),
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if let ProxTerm::Group(s) = self {
            check_len(n, s.dim, "group structure dimension")?;
        }
        Ok(())
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            ProxTerm::Zero => 0.0,
            ProxTerm::L1(w) => w * x.lp_norm(1),
            ProxTerm::Group(s) => (0..s.len())
                .filter(|&b| s.weights[b] != 0.0)
                .map(|b| s.weights[b] * s.block_norm(b, x))
                .sum(),
        }
    }

    /// `prox_{t s}(v)`.
    pub fn prox(&self, v: &Vector, t: f64) -> Result<Vector> {
        check_step(t)?;
        self.check_dim(v.len())?;
        Ok(match self {
            ProxTerm::Zero => v.clone(),
            ProxTerm::L1(w) => soft_threshold(v, t * w),
            ProxTerm::Group(s) => group_shrink(v, s, t),
        })
    }

    /// `prox_{t s*}(v)`, the proximal map of the scaled conjugate.
    ///
    /// For norms `s*` is the indicator of the dual-norm ball, so this is a
    /// projection and does not depend on `t`. It equals
    /// `v - t prox_{s/t}(v/t)`; see [`moreau_conjugate_prox`].
    pub fn prox_conjugate(&self, v: &Vector, t: f64) -> Result<Vector> {
        check_step(t)?;
        self.check_dim(v.len())?;
        Ok(match self {
            ProxTerm::Zero => Vector::zeros(v.len()),
            ProxTerm::L1(w) => v.map(|x| x.clamp(-w, *w)),
            ProxTerm::Group(s) => {
                let mut out = Vector::zeros(v.len());
                for (b, g) in s.groups.iter().enumerate() {
                    let r = s.weights[b];
                    let norm = s.block_norm(b, v);
                    let scale = if norm <= r { 1.0 } else { r / norm };
                    for &i in g {
                        out[i] = v[i] * scale;
                    }
                }
                out
            }
        })
    }
}

fn check_step(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("step must be finite and > 0, got {t}")));
    }
    Ok(())
}

fn soft_threshold(v: &Vector, thr: f64) -> Vector {
    v.map(|x| x.signum() * (x.abs() - thr).max(0.0))
}

fn group_shrink(v: &Vector, s: &GroupStructure, t: f64) -> Vector {
    let mut out = v.clone();
    for (b, g) in s.groups.iter().enumerate() {
        let thr = t * s.weights[b];
        if thr == 0.0 {
            continue;
        }
        let norm = s.block_norm(b, v);
        if norm <= thr {
            for &i in g {
                out[i] = 0.0;
            }
        } else {
            let scale = 1.0 - thr / norm;
            for &i in g {
                out[i] = v[i] * scale;
            }
        }
    }
    out
}

/// Coordinatewise soft threshold `sign(v_i) max(0, |v_i| - t)`, the prox of
/// `t ‖·‖₁`.
pub fn prox_l1(v: &Vector, t: f64) -> Result<Vector> {
    check_step(t)?;
    Ok(soft_threshold(v, t))
}

/// Block soft threshold: each group is scaled by `max(0, 1 - t w_b / ‖v_b‖)`,
/// and set to exactly zero when `‖v_b‖ <= t w_b`.
pub fn prox_group_l2(v: &Vector, structure: &GroupStructure, t: f64) -> Result<Vector> {
    check_step(t)?;
    check_len(v.len(), structure.dim, "group structure dimension")?;
    Ok(group_shrink(v, structure, t))
}

/// Euclidean projection onto the ball of radius `r` centred at the origin.
pub fn project_l2_ball(v: &Vector, r: f64) -> Result<Vector> {
    if !(r >= 0.0) {
        return Err(Error::param("r", format!("radius must be >= 0, got {r}")));
    }
    let norm = v.norm();
    Ok(if norm <= r { v.clone() } else { v * (r / norm) })
}

/// `prox_{s*/γ}(z/γ)` computed from the primal prox alone as
/// `(z - prox_{γ s}(z)) / γ`.
pub fn moreau_conjugate_prox(s: &ProxTerm, z: &Vector, gamma: f64) -> Result<Vector> {
    let p = s.prox(z, gamma)?;
    Ok((z - p) / gamma)
}
