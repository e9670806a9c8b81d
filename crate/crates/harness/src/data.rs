use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mmprox::{Matrix, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::HarnessError;

/// Generated data plus its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    /// Data matrix; a single column for signals.
    pub data: Matrix,
    pub truth: Truth,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    /// Cluster label per row and the cluster means (one row per cluster).
    Clusters { labels: Vec<usize>, means: Matrix },
    /// Noise-free signal.
    Signal(Vector),
    /// Lasso response and true coefficients.
    Regression { response: Vector, coefficients: Vector },
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `n / n_clusters` rows per cluster. Cluster `c` has mean `c · separation` on
/// the first `p_true` coordinates and 0 elsewhere; every entry gets
/// `σ · N(0, 1)` noise. Rows are ordered by cluster.
pub fn gen_gaussian_clusters(
    n: usize,
    p: usize,
    n_clusters: usize,
    p_true: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
) -> Result<SyntheticDataset, HarnessError> {
    if n_clusters == 0 || !n.is_multiple_of(n_clusters) {
        return Err(HarnessError::Config(format!(
            "n = {n} is not divisible by n_clusters = {n_clusters}"
        )));
    }
    if p_true == 0 || p_true > p {
        return Err(HarnessError::Config(format!(
            "need 1 <= p_true <= p = {p}, got {p_true}"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(HarnessError::Config(format!("sigma must be >= 0, got {sigma}")));
    }
    let means = Matrix::from_fn(
        n_clusters,
        p,
        |c, j| if j < p_true { c as f64 * separation } else { 0.0 },
    );
    let per = n / n_clusters;
    let labels: Vec<usize> = (0..n).map(|i| i / per).collect();
    let mut rng = rng(seed);
    let mut data = Matrix::zeros(n, p);
    // fill row by row so the stream order does not depend on storage layout
    for i in 0..n {
        for j in 0..p {
            data[(i, j)] = means[(labels[i], j)] + sigma * normal(&mut rng);
        }
    }
    Ok(SyntheticDataset {
        data,
        truth: Truth::Clusters { labels, means },
        sigma,
        seed,
    })
}

/// `y_i = sin(2π(i - 1)/(n - 1)) + σ · N(0, 1)` for `i = 1..n`.
pub fn gen_noisy_sine(n: usize, sigma: f64, seed: u64) -> Result<SyntheticDataset, HarnessError> {
    if n < 2 {
        return Err(HarnessError::Config(format!("signal length must be >= 2, got {n}")));
    }
    let clean = Vector::from_fn(n, |i, _| (std::f64::consts::TAU * i as f64 / (n - 1) as f64).sin());
    let mut rng = rng(seed);
    let noisy = Vector::from_fn(n, |i, _| clean[i] + sigma * normal(&mut rng));
    Ok(SyntheticDataset {
        data: Matrix::from_column_slice(n, 1, noisy.as_slice()),
        truth: Truth::Signal(clean),
        sigma,
        seed,
    })
}

/// Gaussian design `n x p`, coefficients `1` on the first `support` entries
/// and 0 elsewhere, response `Xβ + σ · N(0, 1)`.
pub fn gen_sparse_regression(
    n: usize,
    p: usize,
    support: usize,
    sigma: f64,
    seed: u64,
) -> Result<SyntheticDataset, HarnessError> {
    if n == 0 || p == 0 || support > p {
        return Err(HarnessError::Config(format!(
            "need n, p >= 1 and support <= p, got n={n} p={p} support={support}"
        )));
    }
    let mut rng = rng(seed);
    let mut data = Matrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            data[(i, j)] = normal(&mut rng);
        }
    }
    let coefficients = Vector::from_fn(p, |j, _| if j < support { 1.0 } else { 0.0 });
    let mut response = &data * &coefficients;
    for v in response.iter_mut() {
        *v += sigma * normal(&mut rng);
    }
    Ok(SyntheticDataset {
        data,
        truth: Truth::Regression { response, coefficients },
        sigma,
        seed,
    })
}

pub(crate) fn matrix_csv(m: &Matrix, seed: u64) -> String {
    let mut out = format!("# seed={seed}\n");
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

impl SyntheticDataset {
    /// The response for regression data, otherwise `None`.
    pub fn response(&self) -> Option<&Vector> {
        match &self.truth {
            Truth::Regression { response, .. } => Some(response),
            _ => None,
        }
    }

    /// Writes `data.csv` and a truth file (`labels.csv`, `clean.csv` or
    /// `response.csv` + `coefficients.csv`) into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("data.csv"), matrix_csv(&self.data, self.seed))?;
        let column = |v: &Vector| matrix_csv(&Matrix::from_column_slice(v.len(), 1, v.as_slice()), self.seed);
        match &self.truth {
            Truth::Clusters { labels, .. } => {
                let mut out = format!("# seed={}\n", self.seed);
                for l in labels {
                    writeln!(out, "{}", l + 1).expect("write to string");
                }
                fs::write(dir.join("labels.csv"), out)?;
            }
            Truth::Signal(clean) => fs::write(dir.join("clean.csv"), column(clean))?,
            Truth::Regression { response, coefficients } => {
                fs::write(dir.join("response.csv"), column(response))?;
                fs::write(dir.join("coefficients.csv"), column(coefficients))?;
            }
        }
        Ok(())
    }
}
