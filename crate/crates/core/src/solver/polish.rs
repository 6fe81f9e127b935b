//! Newton refinement of the distinct prototypes for a fixed cluster structure.
//!
//! With labels held fixed the objective reduces to
//! `½ Σ_l n_l ‖m_l − a_l‖² + λ Σ_{l<o} n_l n_o ‖m_l − m_o‖` (plus a constant),
//! where `a_l` is the data mean of cluster `l`. It is smooth and strongly
//! convex while the centroids stay apart, so Newton converges in a handful
//! of steps from the ADMM estimate.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use crate::dataset::{dist, Dataset};
use crate::partition::Partition;

const MAX_NEWTON_STEPS: usize = 60;

/// Returns refined `k × d` centroids, or `None` when the step collapses two
/// centroids to within `collapse_tol` or fails to make progress.
pub fn polish_centroids(
    dataset: &Dataset,
    partition: &Partition,
    lambda: f64,
    collapse_tol: f64,
) -> Option<Array2<f64>> {
    let k = partition.k();
    let d = dataset.d();
    let sizes: Vec<f64> = partition.sizes().iter().map(|&s| s as f64).collect();
    let data_means = Partition::from_data_labels(dataset, partition.labels()).ok()?;
    let a: Vec<f64> = data_means.centroids().iter().copied().collect();
    let mut m: Vec<f64> = partition.centroids().iter().copied().collect();

    let reduced = |m: &[f64]| -> Option<f64> {
        let mut f = 0.0;
        for l in 0..k {
            let r = dist(&m[l * d..(l + 1) * d], &a[l * d..(l + 1) * d]);
            f += 0.5 * sizes[l] * r * r;
            for o in 0..l {
                let g = dist(&m[l * d..(l + 1) * d], &m[o * d..(o + 1) * d]);
                if g <= collapse_tol {
                    return None;
                }
                f += lambda * sizes[l] * sizes[o] * g;
            }
        }
        Some(f)
    };

    let mut f = reduced(&m)?;
    let dim = k * d;
    for _ in 0..MAX_NEWTON_STEPS {
        let mut grad = DVector::<f64>::zeros(dim);
        let mut hess = DMatrix::<f64>::zeros(dim, dim);
        for l in 0..k {
            for c in 0..d {
                grad[l * d + c] += sizes[l] * (m[l * d + c] - a[l * d + c]);
                hess[(l * d + c, l * d + c)] += sizes[l];
            }
            for o in 0..l {
                let diff: Vec<f64> = (0..d).map(|c| m[l * d + c] - m[o * d + c]).collect();
                let g = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
                let w = lambda * sizes[l] * sizes[o];
                for c in 0..d {
                    let e = diff[c] / g;
                    grad[l * d + c] += w * e;
                    grad[o * d + c] -= w * e;
                }
                // w (I − e eᵀ) / g on the diagonal blocks, negated off-diagonal.
                for r in 0..d {
                    for c in 0..d {
                        let proj = f64::from(u8::from(r == c)) - diff[r] * diff[c] / (g * g);
                        let h = w * proj / g;
                        hess[(l * d + r, l * d + c)] += h;
                        hess[(o * d + r, o * d + c)] += h;
                        hess[(l * d + r, o * d + c)] -= h;
                        hess[(o * d + r, l * d + c)] -= h;
                    }
                }
            }
        }
        let grad_norm = grad.norm();
        if grad_norm <= 1e-13 * (1.0 + f.abs()) {
            break;
        }
        let step = hess.cholesky()?.solve(&(-&grad));
        let slope = grad.dot(&step);
        if slope >= 0.0 {
            return None;
        }
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial: Vec<f64> = m.iter().zip(step.iter()).map(|(v, s)| v + t * s).collect();
            if let Some(ft) = reduced(&trial) {
                if ft <= f + 1e-4 * t * slope {
                    m = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // No decrease representable in floating point: already optimal.
            break;
        }
        if t * step.norm() <= 1e-15 * (1.0 + m.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Array2::from_shape_vec((k, d), m).ok()
}
