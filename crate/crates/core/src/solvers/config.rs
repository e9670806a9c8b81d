use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which inner step size to use for sparse convex clustering.
///
/// `Safe` uses `1 / (L_f + ν · 2 max_i G_ii)`, which is a valid Lipschitz
/// bound. `Experiment` uses the looser `1 / (L_f + ν max_i G_ii)`; it has no
/// convergence guarantee. Problems without a separate experiment bound use
/// the safe step in both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaMode {
    #[default]
    Safe,
    Experiment,
}

impl std::str::FromStr for EtaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "safe" => Ok(EtaMode::Safe),
            "experiment" => Ok(EtaMode::Experiment),
            other => Err(Error::param("eta_mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Initial penalty ν₁.
    pub nu_init: f64,
    /// ν_{k+1} = min(nu_growth · ν_k, nu_max).
    pub nu_growth: f64,
    pub nu_max: f64,
    /// Scaled primal residual and relative x-change tolerance.
    pub outer_tol: f64,
    pub outer_max: usize,
    /// Relative objective change that ends an inner FISTA run.
    pub inner_tol: f64,
    pub inner_max: usize,
    pub eta_mode: EtaMode,
    /// Fixed penalty for AMA; defaults to `μ / operator_spectral_bound`.
    pub ama_penalty: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nu_init: 1.0,
            nu_growth: 1.1,
            nu_max: 1e6,
            outer_tol: 1e-5,
            outer_max: 1000,
            inner_tol: 1e-8,
            inner_max: 500,
            eta_mode: EtaMode::Safe,
            ama_penalty: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("nu_init", self.nu_init)?;
        positive("nu_max", self.nu_max)?;
        positive("outer_tol", self.outer_tol)?;
        positive("inner_tol", self.inner_tol)?;
        if !(self.nu_growth >= 1.0) || !self.nu_growth.is_finite() {
            return Err(Error::param(
                "nu_growth",
                format!("must be >= 1, got {}", self.nu_growth),
            ));
        }
        if self.nu_max < self.nu_init {
            return Err(Error::param("nu_max", "must be >= nu_init"));
        }
        if self.outer_max == 0 || self.inner_max == 0 {
            return Err(Error::param("outer_max/inner_max", "must be >= 1"));
        }
        if let Some(p) = self.ama_penalty {
            positive("ama_penalty", p)?;
        }
        Ok(())
    }

    pub(crate) fn next_nu(&self, nu: f64) -> f64 {
        (nu * self.nu_growth).min(self.nu_max)
    }
}
