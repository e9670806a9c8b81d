use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mmprox::problems::unflatten_rows;
use mmprox::EtaMode;
use mmprox_harness::bench::trace_csv;
use mmprox_harness::data::Truth;
use mmprox_harness::{
    compare_solvers, run_benchmark, run_cell, BenchReport, CellStatus, Instance, RunConfig, SolverKind,
};

#[derive(Parser)]
#[command(name = "mmprox", version, about = "Composite convex solvers and benchmark sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem with one solver; writes solution.csv and trace.csv.
    Solve(RunArgs),
    /// Run the sweep described by a configuration file.
    Bench(RunArgs),
    /// Summarize a report.csv produced by `bench`.
    Compare {
        report: PathBuf,
        /// Write the comparison CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the configured synthetic dataset.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the solver list.
    #[arg(long, value_parser = parse_solver)]
    solver: Option<SolverKind>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_parser = parse_eta)]
    eta_mode: Option<EtaMode>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: mmprox_harness::HarnessError| e.to_string())
}

fn parse_eta(s: &str) -> Result<EtaMode, String> {
    s.parse().map_err(|e: mmprox::Error| e.to_string())
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut c = RunConfig::load(&self.config).with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(s) = self.solver {
            c.solvers = vec![s];
        }
        if let Some(g) = self.gamma {
            c.grid.gamma = vec![g];
        }
        if let Some(g) = self.gamma1 {
            c.grid.gamma1 = vec![g];
        }
        if let Some(g) = self.gamma2 {
            c.grid.gamma2 = vec![g];
        }
        if let Some(k) = self.order {
            c.grid.order = vec![k];
        }
        if let Some(m) = self.eta_mode {
            c.solver.eta_mode = m;
        }
        if let Some(out) = &self.out {
            c.output = out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn solve(args: &RunArgs) -> Result<bool> {
    let config = args.load()?;
    let point = config.points()[0];
    let solver = config.solvers[0];
    let instance = Instance::load(&config)?;
    let row = run_cell(&instance, solver, point, &config.solver);
    if row.status == CellStatus::Failed {
        bail!("{solver} failed at {}: {}", point.label(), row.message);
    }
    let x = row.x.as_ref().expect("solved cells carry x");
    let solution = match config.problem {
        mmprox_harness::ProblemKind::Scc => unflatten_rows(x, instance.data.nrows(), instance.data.ncols()),
        _ => mmprox::Matrix::from_column_slice(x.len(), 1, x.as_slice()),
    };
    fs::create_dir_all(&config.output)?;
    let mut text = format!("# seed={}\n", config.seed);
    for r in solution.row_iter() {
        text.push_str(&r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    fs::write(config.output.join("solution.csv"), text)?;
    fs::write(config.output.join("trace.csv"), trace_csv(config.seed, &row.trace)?)?;
    println!(
        "{solver} {}: status={} objective={} residual={:e} outer={} inner={} wall_ms={:.1}",
        point.label(),
        row.status,
        row.objective,
        row.primal_residual,
        row.outer_iters,
        row.inner_iters,
        row.wall_ms
    );
    Ok(row.status != CellStatus::Diverged)
}

fn bench(args: &RunArgs) -> Result<bool> {
    let config = args.load()?;
    let report = run_benchmark(&config)?;
    let failed = report.rows.iter().filter(|r| r.status == CellStatus::Failed).count();
    for r in report.rows.iter().filter(|r| r.status == CellStatus::Failed) {
        eprintln!("{} {}: {}", r.solver, r.point.label(), r.message);
    }
    if let Ok(c) = compare_solvers(&report) {
        print!("{}", c.table());
    }
    println!(
        "{} cells, {failed} failed; report in {}",
        report.rows.len(),
        config.output.join("report.csv").display()
    );
    Ok(!report.any_diverged() && failed == 0)
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Solve(args) => solve(&args),
        Command::Bench(args) => bench(&args),
        Command::Compare { report, out } => {
            let text = fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let c = compare_solvers(&BenchReport::read_csv(&text)?)?;
            print!("{}", c.table());
            if let Some(out) = out {
                fs::write(out, c.to_csv()?)?;
            }
            Ok(true)
        }
        Command::Gen { config, seed, out } => {
            let mut c = RunConfig::load(&config)?;
            let seed = seed.unwrap_or(c.seed);
            c.seed = seed;
            let Some(d) = c.data.generate(seed)? else {
                bail!("data source is a file; nothing to generate");
            };
            let dir = out.unwrap_or(c.output);
            d.write(&dir)?;
            let what = match d.truth {
                Truth::Clusters { .. } => "clusters",
                Truth::Signal(_) => "signal",
                Truth::Regression { .. } => "regression",
            };
            println!(
                "wrote {what} data {}x{} to {}",
                d.data.nrows(),
                d.data.ncols(),
                dir.display()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
