use serde::{Deserialize, Serialize};

use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::Diverged => "diverged",
        })
    }
}

/// One outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub outer_iter: usize,
    pub inner_iters: usize,
    /// `f + g + h(A·)` at the current iterate.
    pub objective: f64,
    /// `‖Ax - y‖ / max(1, ‖y‖)`; zero for unconstrained solvers.
    pub primal_residual: f64,
    /// Milliseconds since the solver started.
    pub wall_ms: f64,
    /// False when the inner solver hit its iteration cap.
    pub inner_converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x: Vector,
    /// Final multiplier; empty for solvers without one.
    pub lambda: Vector,
    pub trace: Vec<TraceEntry>,
    pub status: Status,
}

impl SolverResult {
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.objective)
    }

    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.primal_residual)
    }

    pub fn outer_iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn inner_iterations(&self) -> usize {
        self.trace.iter().map(|t| t.inner_iters).sum()
    }

    pub fn wall_ms(&self) -> f64 {
        self.trace.last().map_or(0.0, |t| t.wall_ms)
    }
}
