//! Builders that assemble [`CompositeProblem`](crate::CompositeProblem)s for
//! the lasso, sparse convex clustering and ℓ1 trend filtering.

mod lasso;
mod scc;
mod trend;

pub use lasso::build_lasso;
pub use scc::{
    build_scc, flatten_rows, knn_gaussian_weights, scc_objective, scc_step_size, unflatten_rows, zero_columns, SccSpec,
    WeightedEdges,
};
pub use trend::{build_trend_filter, tf_objective, tf_step_size, TrendFilterSpec};
