use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use mmprox::linops::io::{load_matrix, load_vector};
use mmprox::problems::{
    build_lasso, build_scc, build_trend_filter, flatten_rows, knn_gaussian_weights, unflatten_rows, zero_columns,
    SccSpec, TrendFilterSpec,
};
use mmprox::solvers::{admm, ama, proximal_gradient, solve_proposed, SmoothTerm, XUpdate};
use mmprox::{CompositeProblem, Matrix, SolverConfig, SolverResult, Status, TraceEntry, Vector};
use rayon::prelude::*;

use crate::config::{DataSource, ParamPoint, ProblemKind, RunConfig, SolverKind};
use crate::HarnessError;

/// Outcome of one (solver, parameter point) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Converged,
    MaxIters,
    Diverged,
    /// Construction or solver error; see the row message.
    Failed,
}

impl From<Status> for CellStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => CellStatus::Converged,
            Status::MaxIters => CellStatus::MaxIters,
            Status::Diverged => CellStatus::Diverged,
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Converged => "converged",
            CellStatus::MaxIters => "max_iters",
            CellStatus::Diverged => "diverged",
            CellStatus::Failed => "failed",
        })
    }
}

impl FromStr for CellStatus {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "converged" => Ok(CellStatus::Converged),
            "max_iters" => Ok(CellStatus::MaxIters),
            "diverged" => Ok(CellStatus::Diverged),
            "failed" => Ok(CellStatus::Failed),
            other => Err(HarnessError::Report(format!("unknown status '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub solver: SolverKind,
    pub point: ParamPoint,
    pub status: CellStatus,
    pub wall_ms: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub objective: f64,
    pub primal_residual: f64,
    /// Exactly-zero columns of U (clustering only).
    pub zero_columns: Option<usize>,
    pub message: String,
    /// Final iterate; not part of the CSV.
    pub x: Option<Vector>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub problem: ProblemKind,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

/// Loaded data for one run.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ProblemKind,
    pub data: Matrix,
    pub response: Option<Vector>,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

/// A problem ready to solve, with its starting point.
pub struct Built {
    pub problem: CompositeProblem,
    /// Lasso in plain form (`h ≡ 0`), used by FISTA.
    pub plain: Option<CompositeProblem>,
    pub x0: Vector,
    pub shape: (usize, usize),
}

impl Instance {
    /// Loads or generates the data and, for clustering, the k-NN weights.
    pub fn load(config: &RunConfig) -> Result<Self, HarnessError> {
        let (data, response) = match (&config.data, config.data.generate(config.seed)?) {
            (_, Some(d)) => {
                let response = d.response().cloned();
                (d.data, response)
            }
            (DataSource::File { path, response }, None) => {
                let data = match config.problem {
                    ProblemKind::Tf => {
                        let y = load_vector(path)?;
                        Matrix::from_column_slice(y.len(), 1, y.as_slice())
                    }
                    _ => load_matrix(path)?,
                };
                let response = response.as_ref().map(load_vector).transpose()?;
                (data, response)
            }
            (_, None) => unreachable!("only file sources produce no dataset"),
        };
        let (edges, weights) = if config.problem == ProblemKind::Scc {
            let w = &config.weights;
            let phi = w.phi.unwrap_or(0.5 / data.ncols() as f64);
            knn_gaussian_weights(&data, w.knn, phi, &vec![w.scale; data.nrows()])?
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            problem: config.problem,
            data,
            response,
            edges,
            weights,
        })
    }

    pub fn scc_spec(&self, gamma1: f64, gamma2: f64) -> SccSpec {
        SccSpec::new(
            self.data.clone(),
            gamma1,
            gamma2,
            self.edges.clone(),
            self.weights.clone(),
        )
    }

    pub fn build(&self, point: &ParamPoint) -> Result<Built, HarnessError> {
        let missing = |name: &str| HarnessError::Config(format!("grid point lacks {name}"));
        Ok(match self.problem {
            ProblemKind::Scc => {
                let spec = self.scc_spec(
                    point.gamma1.ok_or_else(|| missing("gamma1"))?,
                    point.gamma2.ok_or_else(|| missing("gamma2"))?,
                );
                Built {
                    problem: build_scc(&spec)?,
                    plain: None,
                    x0: flatten_rows(&self.data),
                    shape: self.data.shape(),
                }
            }
            ProblemKind::Tf => {
                let y = Vector::from_column_slice(self.data.as_slice());
                let spec = TrendFilterSpec::new(
                    y.clone(),
                    point.order.ok_or_else(|| missing("order"))?,
                    point.gamma.ok_or_else(|| missing("gamma"))?,
                );
                Built {
                    problem: build_trend_filter(&spec)?,
                    plain: None,
                    shape: (y.len(), 1),
                    x0: y,
                }
            }
            ProblemKind::Lasso => {
                let y = self
                    .response
                    .as_ref()
                    .ok_or_else(|| HarnessError::Config("lasso needs a response".into()))?;
                let gamma = point.gamma.ok_or_else(|| missing("gamma"))?;
                let p = self.data.ncols();
                Built {
                    problem: build_lasso(&self.data, y, gamma, true)?,
                    plain: Some(build_lasso(&self.data, y, gamma, false)?),
                    x0: Vector::zeros(p),
                    shape: (p, 1),
                }
            }
        })
    }
}

/// Runs one solver; FISTA uses `inner_tol` and `outer_max · inner_max`
/// iterations with step `1 / L_f`.
pub fn run_solver(solver: SolverKind, built: &Built, config: &SolverConfig) -> Result<SolverResult, HarnessError> {
    let p = &built.problem;
    Ok(match solver {
        SolverKind::Proposed => solve_proposed(p, config, &built.x0, &Vector::zeros(p.dual_dim()))?,
        SolverKind::Admm => admm(p, XUpdate::Auto, config, &built.x0)?,
        SolverKind::Ama => ama(p, config, &built.x0)?,
        SolverKind::Fista => {
            let plain = built
                .plain
                .as_ref()
                .ok_or_else(|| HarnessError::Config("fista applies to lasso only".into()))?;
            let f = plain.f();
            proximal_gradient(
                f,
                plain.g(),
                &built.x0,
                1.0 / f.lipschitz(),
                true,
                config.inner_tol,
                config.outer_max * config.inner_max,
            )?
        }
    })
}

fn failed_row(solver: SolverKind, point: ParamPoint, err: HarnessError) -> BenchRow {
    BenchRow {
        solver,
        point,
        status: CellStatus::Failed,
        wall_ms: 0.0,
        outer_iters: 0,
        inner_iters: 0,
        objective: f64::NAN,
        primal_residual: f64::NAN,
        zero_columns: None,
        message: err.to_string(),
        x: None,
        trace: Vec::new(),
    }
}

/// Builds and solves one cell. Only the solver call is timed.
pub fn run_cell(instance: &Instance, solver: SolverKind, point: ParamPoint, config: &SolverConfig) -> BenchRow {
    let built = match instance.build(&point) {
        Ok(b) => b,
        Err(e) => return failed_row(solver, point, e),
    };
    let start = Instant::now();
    let result = run_solver(solver, &built, config);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let result = match result {
        Ok(r) => r,
        Err(e) => return failed_row(solver, point, e),
    };
    let zero_columns = (instance.problem == ProblemKind::Scc)
        .then(|| zero_columns(&unflatten_rows(&result.x, built.shape.0, built.shape.1)));
    BenchRow {
        solver,
        point,
        status: result.status.into(),
        wall_ms,
        outer_iters: result.outer_iterations(),
        inner_iters: result.inner_iterations(),
        objective: result.final_objective(),
        primal_residual: result.final_residual(),
        zero_columns,
        message: String::new(),
        x: Some(result.x),
        trace: result.trace,
    }
}

/// Executes every (point, solver) cell without writing anything.
pub fn execute(config: &RunConfig) -> Result<BenchReport, HarnessError> {
    config.validate()?;
    let instance = Instance::load(config)?;
    let cells: Vec<(ParamPoint, SolverKind)> = config
        .points()
        .into_iter()
        .flat_map(|pt| config.solvers.iter().map(move |&s| (pt, s)))
        .collect();
    let run = |&(pt, s): &(ParamPoint, SolverKind)| run_cell(&instance, s, pt, &config.solver);
    let rows = if config.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    };
    Ok(BenchReport {
        problem: config.problem,
        seed: config.seed,
        rows,
    })
}

/// Runs the sweep and writes `report.csv` plus one trace per cell under
/// `config.output`.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchReport, HarnessError> {
    let report = execute(config)?;
    report.write(&config.output)?;
    Ok(report)
}

pub const REPORT_HEADER: [&str; 13] = [
    "solver",
    "gamma",
    "gamma1",
    "gamma2",
    "order",
    "status",
    "wall_ms",
    "outer_iters",
    "inner_iters",
    "objective",
    "primal_residual",
    "zero_columns",
    "message",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn csv_text(
    seed: u64,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(format!("# seed={seed}\n").into_bytes());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn trace_csv(seed: u64, trace: &[TraceEntry]) -> Result<String, HarnessError> {
    csv_text(
        seed,
        &["outer_iter", "inner_iters", "objective", "primal_residual", "wall_ms"],
        trace.iter().map(|t| {
            vec![
                t.outer_iter.to_string(),
                t.inner_iters.to_string(),
                t.objective.to_string(),
                t.primal_residual.to_string(),
                t.wall_ms.to_string(),
            ]
        }),
    )
}

impl BenchReport {
    pub fn any_diverged(&self) -> bool {
        self.rows.iter().any(|r| r.status == CellStatus::Diverged)
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        csv_text(
            self.seed,
            &REPORT_HEADER,
            self.rows.iter().map(|r| {
                vec![
                    r.solver.to_string(),
                    opt(r.point.gamma),
                    opt(r.point.gamma1),
                    opt(r.point.gamma2),
                    opt(r.point.order),
                    r.status.to_string(),
                    r.wall_ms.to_string(),
                    r.outer_iters.to_string(),
                    r.inner_iters.to_string(),
                    r.objective.to_string(),
                    r.primal_residual.to_string(),
                    opt(r.zero_columns),
                    r.message.clone(),
                ]
            }),
        )
    }

    pub fn trace_file_name(&self, row: &BenchRow) -> String {
        let problem = match self.problem {
            ProblemKind::Scc => "scc",
            ProblemKind::Tf => "tf",
            ProblemKind::Lasso => "lasso",
        };
        format!("{problem}_{}_{}.csv", row.point.label(), row.solver)
    }

    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces)?;
        fs::write(dir.join("report.csv"), self.to_csv()?)?;
        for row in &self.rows {
            fs::write(
                traces.join(self.trace_file_name(row)),
                trace_csv(self.seed, &row.trace)?,
            )?;
        }
        Ok(())
    }

    /// Reads a report written by [`BenchReport::write`]. Iterates and traces
    /// are not stored in the CSV; the problem kind is inferred from which
    /// parameter columns are filled.
    pub fn read_csv(text: &str) -> Result<Self, HarnessError> {
        let seed = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# seed="))
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(0);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != REPORT_HEADER {
            return Err(HarnessError::Report("unexpected report header".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| HarnessError::Report(format!("row {}: bad {what}", i + 1));
            let float = |j: usize| -> Result<Option<f64>, HarnessError> {
                let s = &rec[j];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(REPORT_HEADER[j]))
                }
            };
            let count = |j: usize| -> Result<Option<usize>, HarnessError> {
                let s = &rec[j];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(REPORT_HEADER[j]))
                }
            };
            rows.push(BenchRow {
                solver: rec[0].parse()?,
                point: ParamPoint {
                    gamma: float(1)?,
                    gamma1: float(2)?,
                    gamma2: float(3)?,
                    order: count(4)?,
                },
                status: rec[5].parse()?,
                wall_ms: float(6)?.ok_or_else(|| bad("wall_ms"))?,
                outer_iters: count(7)?.ok_or_else(|| bad("outer_iters"))?,
                inner_iters: count(8)?.ok_or_else(|| bad("inner_iters"))?,
                objective: float(9)?.ok_or_else(|| bad("objective"))?,
                primal_residual: float(10)?.ok_or_else(|| bad("primal_residual"))?,
                zero_columns: count(11)?,
                message: rec[12].to_string(),
                x: None,
                trace: Vec::new(),
            });
        }
        let problem = match rows.first().map(|r| r.point) {
            Some(pt) if pt.gamma1.is_some() => ProblemKind::Scc,
            Some(pt) if pt.order.is_some() => ProblemKind::Tf,
            _ => ProblemKind::Lasso,
        };
        Ok(Self { problem, seed, rows })
    }
}
