//! Synthetic data, benchmark sweeps and solver comparison for `mmprox`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod compare;
pub mod config;
pub mod data;

pub use bench::{execute, run_benchmark, run_cell, run_solver, BenchReport, BenchRow, Built, CellStatus, Instance};
pub use compare::{compare_solvers, Comparison, PointSummary, SolverEntry, SolverSummary};
pub use config::{DataSource, Grid, ParamPoint, ProblemKind, RunConfig, SolverKind, WeightSpec};
pub use data::{gen_gaussian_clusters, gen_noisy_sine, gen_sparse_regression, SyntheticDataset, Truth};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid report: {0}")]
    Report(String),
    #[error(transparent)]
    Core(#[from] mmprox::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
