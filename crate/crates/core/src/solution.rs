use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::objective::{check_shape, objective};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

/// Prototype matrix `Ū` (one row per data point) with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSolution {
    pub prototypes: Array2<f64>,
    pub lambda: f64,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Residuals,
}

impl PrototypeSolution {
    /// Wrap externally computed prototypes, e.g. a third-party solution
    /// loaded for auditing. The objective is evaluated here.
    pub fn from_prototypes(dataset: &Dataset, prototypes: Array2<f64>, lambda: f64) -> Result<Self> {
        check_shape(dataset, &prototypes)?;
        let objective_value = objective(dataset, &prototypes, lambda)?;
        Ok(Self {
            prototypes: prototypes.as_standard_layout().into_owned(),
            lambda,
            objective_value,
            iterations: 0,
            converged: true,
            residuals: Residuals::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.prototypes.nrows()
    }

    pub fn d(&self) -> usize {
        self.prototypes.ncols()
    }

    pub fn prototype(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.prototypes.as_slice().expect("standard layout")[i * d..(i + 1) * d]
    }

    pub fn partition(&self, fuse_tol: f64) -> Partition {
        Partition::extract(&self.prototypes, fuse_tol)
    }
}
