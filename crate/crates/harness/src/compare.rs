use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::bench::{csv_text, BenchReport, CellStatus};
use crate::config::{ParamPoint, SolverKind};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverEntry {
    pub solver: SolverKind,
    pub status: CellStatus,
    pub objective: f64,
    pub wall_ms: f64,
    /// `(objective - best) / |best|`; `None` for diverged or failed cells.
    pub gap: Option<f64>,
    /// Wall time relative to the proposed method at the same point.
    pub speed_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub point: ParamPoint,
    /// Smallest objective over usable cells.
    pub best_objective: Option<f64>,
    pub entries: Vec<SolverEntry>,
}

/// Per-solver aggregates over the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub solver: SolverKind,
    pub max_gap: Option<f64>,
    pub wall_min_ms: f64,
    pub wall_max_ms: f64,
    pub failures: usize,
}

impl SolverSummary {
    /// `wall_max / wall_min` over usable cells.
    pub fn wall_spread(&self) -> f64 {
        self.wall_max_ms / self.wall_min_ms
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub seed: u64,
    pub points: Vec<PointSummary>,
    pub solvers: Vec<SolverSummary>,
}

fn usable(status: CellStatus, objective: f64) -> bool {
    matches!(status, CellStatus::Converged | CellStatus::MaxIters) && objective.is_finite()
}

/// Per-point best objective, relative gaps and speed ratios against the
/// proposed method. Every solver must cover the same grid points.
pub fn compare_solvers(report: &BenchReport) -> Result<Comparison, HarnessError> {
    let mut by_point: BTreeMap<_, (ParamPoint, BTreeMap<SolverKind, usize>)> = BTreeMap::new();
    let mut order = Vec::new();
    for (i, row) in report.rows.iter().enumerate() {
        let key = row.point.key();
        let slot = by_point.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (row.point, BTreeMap::new())
        });
        if slot.1.insert(row.solver, i).is_some() {
            return Err(HarnessError::Report(format!(
                "duplicate cell for {} at {}",
                row.solver,
                row.point.label()
            )));
        }
    }
    let solvers: BTreeSet<SolverKind> = report.rows.iter().map(|r| r.solver).collect();
    if solvers.len() < 2 {
        return Err(HarnessError::Report("need at least two solvers to compare".into()));
    }
    for (point, cells) in by_point.values() {
        if cells.len() != solvers.len() {
            return Err(HarnessError::Report(format!(
                "solvers do not share a grid: point {} has {} of {} solvers",
                point.label(),
                cells.len(),
                solvers.len()
            )));
        }
    }

    let mut points = Vec::new();
    for key in &order {
        let (point, cells) = &by_point[key];
        let rows: Vec<_> = cells.values().map(|&i| &report.rows[i]).collect();
        let best = rows
            .iter()
            .filter(|r| usable(r.status, r.objective))
            .map(|r| r.objective)
            .reduce(f64::min);
        let proposed_ms = rows
            .iter()
            .find(|r| r.solver == SolverKind::Proposed && usable(r.status, r.objective))
            .map(|r| r.wall_ms);
        let entries = rows
            .iter()
            .map(|r| {
                let ok = usable(r.status, r.objective);
                SolverEntry {
                    solver: r.solver,
                    status: r.status,
                    objective: r.objective,
                    wall_ms: r.wall_ms,
                    gap: best
                        .filter(|_| ok)
                        .map(|b| (r.objective - b) / b.abs().max(f64::EPSILON)),
                    speed_ratio: proposed_ms.filter(|p| ok && *p > 0.0).map(|p| r.wall_ms / p),
                }
            })
            .collect();
        points.push(PointSummary {
            point: *point,
            best_objective: best,
            entries,
        });
    }

    let solvers = solvers
        .into_iter()
        .map(|s| {
            let entries: Vec<&SolverEntry> = points
                .iter()
                .flat_map(|p| &p.entries)
                .filter(|e| e.solver == s)
                .collect();
            let ok: Vec<&&SolverEntry> = entries.iter().filter(|e| e.gap.is_some()).collect();
            SolverSummary {
                solver: s,
                max_gap: ok.iter().filter_map(|e| e.gap).reduce(f64::max),
                wall_min_ms: ok.iter().map(|e| e.wall_ms).fold(f64::INFINITY, f64::min),
                wall_max_ms: ok.iter().map(|e| e.wall_ms).fold(0.0, f64::max),
                failures: entries.len() - ok.len(),
            }
        })
        .collect();
    Ok(Comparison {
        seed: report.seed,
        points,
        solvers,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn short(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "n/a".into())
}

impl Comparison {
    /// One row per (point, solver); unavailable gaps and ratios are empty.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        csv_text(
            self.seed,
            &[
                "point",
                "solver",
                "status",
                "objective",
                "best_objective",
                "relative_gap",
                "wall_ms",
                "speed_ratio",
            ],
            self.points.iter().flat_map(|p| {
                p.entries.iter().map(move |e| {
                    vec![
                        p.point.label(),
                        e.solver.to_string(),
                        e.status.to_string(),
                        e.objective.to_string(),
                        opt(p.best_objective),
                        opt(e.gap),
                        e.wall_ms.to_string(),
                        opt(e.speed_ratio),
                    ]
                })
            }),
        )
    }

    /// Plain-text table followed by per-solver aggregates.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24} {:<9} {:<10} {:>14} {:>10} {:>10} {:>8}",
            "point", "solver", "status", "objective", "gap", "wall_ms", "ratio"
        );
        for p in &self.points {
            for e in &p.entries {
                let _ = writeln!(
                    out,
                    "{:<24} {:<9} {:<10} {:>14.8e} {:>10} {:>10.1} {:>8}",
                    p.point.label(),
                    e.solver.name(),
                    e.status.to_string(),
                    e.objective,
                    short(e.gap),
                    e.wall_ms,
                    e.speed_ratio.map(|r| format!("{r:.2}")).unwrap_or_else(|| "n/a".into()),
                );
            }
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<9} {:>10} {:>12} {:>12} {:>8} {:>8}",
            "solver", "max_gap", "min_ms", "max_ms", "spread", "failed"
        );
        for s in &self.solvers {
            let _ = writeln!(
                out,
                "{:<9} {:>10} {:>12.1} {:>12.1} {:>8.2} {:>8}",
                s.solver.name(),
                short(s.max_gap),
                s.wall_min_ms,
                s.wall_max_ms,
                s.wall_spread(),
                s.failures
            );
        }
        out
    }
}
