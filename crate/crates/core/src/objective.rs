use ndarray::Array2;

use crate::dataset::{check_finite, dist, dist_sq, Dataset};
use crate::error::{invalid, Error, Result};

/// `½ Σ_i ‖u_i − x_i‖² + λ Σ_{j<i} ‖u_i − u_j‖`.
///
/// Pairs are accumulated in the fixed order `i = 1..n, j = 0..i` so the
/// result is bit-reproducible.
pub fn objective(dataset: &Dataset, prototypes: &Array2<f64>, lambda: f64) -> Result<f64> {
    check_shape(dataset, prototypes)?;
    check_finite(prototypes)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
    }
    let u = prototypes.as_standard_layout();
    let u = u.as_slice().expect("standard layout");
    Ok(objective_flat(dataset.flat(), u, dataset.d(), lambda))
}

pub(crate) fn objective_flat(x: &[f64], u: &[f64], d: usize, lambda: f64) -> f64 {
    let n = x.len() / d;
    let row = |i: usize| i * d..(i + 1) * d;
    let mut loss = 0.0;
    for i in 0..n {
        loss += dist_sq(&u[row(i)], &x[row(i)]);
    }
    let mut penalty = 0.0;
    if lambda > 0.0 {
        for i in 1..n {
            for j in 0..i {
                penalty += dist(&u[row(i)], &u[row(j)]);
            }
        }
    }
    0.5 * loss + lambda * penalty
}

pub(crate) fn check_shape(dataset: &Dataset, prototypes: &Array2<f64>) -> Result<()> {
    if prototypes.dim() != (dataset.n(), dataset.d()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", dataset.n(), dataset.d()),
            found: format!("{}x{}", prototypes.nrows(), prototypes.ncols()),
        });
    }
    Ok(())
}
