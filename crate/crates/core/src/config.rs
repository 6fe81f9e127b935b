use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{invalid, Result};

/// Relative fusion threshold: prototypes closer than this fraction of the
/// largest pairwise data distance are treated as one.
pub const DEFAULT_FUSE_FRACTION: f64 = 1e-4;

/// Solver settings. Tolerances are relative to `Dataset::scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub max_iters: usize,
    /// Initial ADMM penalty parameter.
    pub admm_rho: f64,
    /// Rescale rho when the primal and dual residuals drift apart.
    pub adaptive_rho: bool,
    /// Absolute fusion threshold. `None` resolves to
    /// `DEFAULT_FUSE_FRACTION × max pairwise distance` of the dataset.
    pub fuse_tol: Option<f64>,
    /// After ADMM converges, refine the distinct prototypes by Newton's method
    /// on the problem restricted to the detected cluster structure.
    pub polish: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            primal_tol: 1e-6,
            dual_tol: 1e-6,
            max_iters: 10_000,
            admm_rho: 1.0,
            adaptive_rho: true,
            fuse_tol: None,
            polish: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", format!("must be finite and >= 0, got {}", self.lambda)));
        }
        for (name, v) in [
            ("primal_tol", self.primal_tol),
            ("dual_tol", self.dual_tol),
            ("admm_rho", self.admm_rho),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(t) = self.fuse_tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(invalid("fuse_tol", format!("must be finite and > 0, got {t}")));
            }
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be at least 1"));
        }
        Ok(())
    }

    pub fn resolved_fuse_tol(&self, dataset: &Dataset) -> f64 {
        self.fuse_tol.unwrap_or_else(|| default_fuse_tol(dataset))
    }
}

pub fn default_fuse_tol(dataset: &Dataset) -> f64 {
    let span = dataset.max_pairwise_distance();
    if span > 0.0 {
        DEFAULT_FUSE_FRACTION * span
    } else {
        1e-12
    }
}
