use crate::error::{Error, Result};
use crate::Vector;

/// Cholesky factor of a symmetric positive definite band matrix.
///
/// Stores the lower factor `L` row by row: `band[i][d] = L[i, i - d]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    band: Vec<Vec<f64>>,
}

impl BandedCholesky {
    /// Factors the `n x n` matrix whose entries within `|i - j| <= bandwidth`
    /// are given by `entry` (only `j <= i` is queried).
    pub fn factor(n: usize, bandwidth: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut band = vec![vec![0.0; bandwidth + 1]; n];
        for i in 0..n {
            let start = i.saturating_sub(bandwidth);
            for j in start..=i {
                let mut s = entry(i, j);
                let kstart = start.max(j.saturating_sub(bandwidth));
                for k in kstart..j {
                    s -= band[i][i - k] * band[j][j - k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    band[i][0] = s.sqrt();
                } else {
                    band[i][i - j] = s / band[j][0];
                }
            }
        }
        Ok(Self { n, bandwidth, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &Vector) -> Vector {
        assert_eq!(rhs.len(), self.n, "banded solve rhs length");
        let bw = self.bandwidth;
        let mut z = rhs.clone();
        for i in 0..self.n {
            let mut s = z[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i][i - k] * z[k];
            }
            z[i] = s / self.band[i][0];
        }
        for i in (0..self.n).rev() {
            let mut s = z[i];
            for k in (i + 1)..(i + bw + 1).min(self.n) {
                s -= self.band[k][k - i] * z[k];
            }
            z[i] = s / self.band[i][0];
        }
        z
    }
}
