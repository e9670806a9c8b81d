use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mmprox::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::data::{gen_gaussian_clusters, gen_noisy_sine, gen_sparse_regression, SyntheticDataset};
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Scc,
    Tf,
    Lasso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Proposed,
    Admm,
    Ama,
    Fista,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Proposed => "proposed",
            SolverKind::Admm => "admm",
            SolverKind::Ama => "ama",
            SolverKind::Fista => "fista",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(SolverKind::Proposed),
            "admm" => Ok(SolverKind::Admm),
            "ama" => Ok(SolverKind::Ama),
            "fista" => Ok(SolverKind::Fista),
            other => Err(HarnessError::Config(format!("unknown solver '{other}'"))),
        }
    }
}

/// Where the data comes from. File paths are resolved relative to the
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// `path` holds the data matrix (SCC), signal (TF) or design (lasso);
    /// `response` is the lasso response.
    File {
        path: PathBuf,
        #[serde(default)]
        response: Option<PathBuf>,
    },
    GaussianClusters {
        n: usize,
        p: usize,
        clusters: usize,
        p_true: usize,
        separation: f64,
        sigma: f64,
    },
    NoisySine {
        n: usize,
        sigma: f64,
    },
    SparseRegression {
        n: usize,
        p: usize,
        support: usize,
        sigma: f64,
    },
}

impl DataSource {
    /// Runs the generator, or `None` for file sources.
    pub fn generate(&self, seed: u64) -> Result<Option<SyntheticDataset>, HarnessError> {
        Ok(Some(match *self {
            DataSource::File { .. } => return Ok(None),
            DataSource::GaussianClusters {
                n,
                p,
                clusters,
                p_true,
                separation,
                sigma,
            } => gen_gaussian_clusters(n, p, clusters, p_true, separation, sigma, seed)?,
            DataSource::NoisySine { n, sigma } => gen_noisy_sine(n, sigma, seed)?,
            DataSource::SparseRegression { n, p, support, sigma } => gen_sparse_regression(n, p, support, sigma, seed)?,
        }))
    }
}

/// Parameter lists; the sweep is their cartesian product. SCC uses
/// `gamma1 x gamma2`, TF uses `gamma x order`, lasso uses `gamma`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub gamma: Vec<f64>,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub order: Vec<usize>,
}

/// k-NN Gaussian kernel weights for clustering. `phi` defaults to `0.5 / p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightSpec {
    pub knn: usize,
    pub phi: Option<f64>,
    pub scale: f64,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self {
            knn: 5,
            phi: None,
            scale: 1.0,
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub gamma: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub order: Option<usize>,
}

impl ParamPoint {
    /// Short label for file names, e.g. `g1-0.5_g2-1`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = self.gamma {
            parts.push(format!("g-{v}"));
        }
        if let Some(v) = self.gamma1 {
            parts.push(format!("g1-{v}"));
        }
        if let Some(v) = self.gamma2 {
            parts.push(format!("g2-{v}"));
        }
        if let Some(v) = self.order {
            parts.push(format!("k-{v}"));
        }
        parts.join("_")
    }

    /// Same grid point, compared by value.
    pub fn key(&self) -> (String, String, String, String) {
        let s = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        (
            s(self.gamma),
            s(self.gamma1),
            s(self.gamma2),
            self.order.map(|k| k.to_string()).unwrap_or_default(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub data: DataSource,
    pub solvers: Vec<SolverKind>,
    pub grid: Grid,
    #[serde(default)]
    pub weights: WeightSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub parallel: bool,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads and validates a configuration file; relative data paths are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let DataSource::File { path, response } = &mut config.data {
            if path.is_relative() {
                *path = base.join(&*path);
            }
            if let Some(r) = response.as_mut().filter(|r| r.is_relative()) {
                *r = base.join(&*r);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.solvers.is_empty() {
            return bad("solver list is empty".into());
        }
        if self.solvers.contains(&SolverKind::Fista) && self.problem != ProblemKind::Lasso {
            return bad("fista applies to lasso only (it needs h ≡ 0)".into());
        }
        let grid = &self.grid;
        // (grid list, is empty) pairs
        type Lists<'a> = &'a [(&'a str, bool)];
        let (needed, unused): (Lists, Lists) = match self.problem {
            ProblemKind::Scc => (
                &[("gamma1", grid.gamma1.is_empty()), ("gamma2", grid.gamma2.is_empty())],
                &[("gamma", grid.gamma.is_empty()), ("order", grid.order.is_empty())],
            ),
            ProblemKind::Tf => (
                &[("gamma", grid.gamma.is_empty()), ("order", grid.order.is_empty())],
                &[("gamma1", grid.gamma1.is_empty()), ("gamma2", grid.gamma2.is_empty())],
            ),
            ProblemKind::Lasso => (
                &[("gamma", grid.gamma.is_empty())],
                &[
                    ("gamma1", grid.gamma1.is_empty()),
                    ("gamma2", grid.gamma2.is_empty()),
                    ("order", grid.order.is_empty()),
                ],
            ),
        };
        if let Some((name, _)) = needed.iter().find(|(_, empty)| *empty) {
            return bad(format!("grid.{name} must be non-empty for this problem"));
        }
        if let Some((name, _)) = unused.iter().find(|(_, empty)| !*empty) {
            return bad(format!("grid.{name} does not apply to this problem"));
        }
        if let Some(g) = grid
            .gamma
            .iter()
            .chain(&grid.gamma1)
            .chain(&grid.gamma2)
            .find(|g| !(**g >= 0.0) || !g.is_finite())
        {
            return bad(format!("grid values must be finite and >= 0, got {g}"));
        }
        let data_ok = matches!(
            (self.problem, &self.data),
            (_, DataSource::File { .. })
                | (ProblemKind::Scc, DataSource::GaussianClusters { .. })
                | (ProblemKind::Tf, DataSource::NoisySine { .. })
                | (ProblemKind::Lasso, DataSource::SparseRegression { .. })
        );
        if !data_ok {
            return bad("data generator does not match the problem kind".into());
        }
        if let DataSource::File { response: None, .. } = self.data {
            if self.problem == ProblemKind::Lasso {
                return bad("lasso file input needs data.response".into());
            }
        }
        self.solver.validate().map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Grid points in sweep order (the last list varies fastest).
    pub fn points(&self) -> Vec<ParamPoint> {
        let g = &self.grid;
        let mut out = Vec::new();
        match self.problem {
            ProblemKind::Scc => {
                for &g1 in &g.gamma1 {
                    for &g2 in &g.gamma2 {
                        out.push(ParamPoint {
                            gamma: None,
                            gamma1: Some(g1),
                            gamma2: Some(g2),
                            order: None,
                        });
                    }
                }
            }
            ProblemKind::Tf => {
                for &k in &g.order {
                    for &gamma in &g.gamma {
                        out.push(ParamPoint {
                            gamma: Some(gamma),
                            gamma1: None,
                            gamma2: None,
                            order: Some(k),
                        });
                    }
                }
            }
            ProblemKind::Lasso => {
                for &gamma in &g.gamma {
                    out.push(ParamPoint {
                        gamma: Some(gamma),
                        gamma1: None,
                        gamma2: None,
                        order: None,
                    });
                }
            }
        }
        out
    }
}
