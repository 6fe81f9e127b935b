use crate::dataset::{norm, Dataset};
use crate::error::{invalid, Error, Result};

/// Single-cluster dataset whose first point lies exactly on the bounding
/// sphere: `x_0 = m − λ(n_l − 1)v₀` and `x_j = m + λv₀` for the rest.
///
/// The mean is `m` and `‖x_0 − m‖ = λ(n_l − 1)`. The dataset is optimal with
/// every prototype equal to `m`, so the bounding radius cannot be reduced.
pub fn construct_boundary_dataset(
    cluster_size: usize,
    lambda: f64,
    prototype: &[f64],
    unit_direction: &[f64],
) -> Result<Dataset> {
    if cluster_size < 2 {
        return Err(invalid("cluster_size", "must be at least 2"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid("lambda", "must be finite and > 0"));
    }
    if prototype.is_empty() || prototype.len() != unit_direction.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("direction of length {}", prototype.len()),
            found: format!("length {}", unit_direction.len()),
        });
    }
    let len = norm(unit_direction);
    if !((len - 1.0).abs() <= 1e-12) {
        return Err(invalid("unit_direction", format!("norm must be 1, got {len}")));
    }
    let radius = lambda * (cluster_size - 1) as f64;
    let mut rows = Vec::with_capacity(cluster_size);
    rows.push(
        prototype
            .iter()
            .zip(unit_direction)
            .map(|(m, v)| m - radius * v)
            .collect::<Vec<f64>>(),
    );
    let inner: Vec<f64> = prototype.iter().zip(unit_direction).map(|(m, v)| m + lambda * v).collect();
    rows.extend(std::iter::repeat(inner).take(cluster_size - 1));
    Dataset::from_rows(&rows)
}
