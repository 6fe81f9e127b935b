//! Independent reference minimizer: accelerated gradient descent on the
//! objective with each pair norm replaced by its Huber smoothing
//! `h_μ(z) = ‖z‖²/(2μ)` for `‖z‖ ≤ μ`, `‖z‖ − μ/2` otherwise.
//!
//! `μ` starts at `smoothing` and decays by 1% per iteration down to
//! `smoothing × 1e-5`. The step is `1 / (1 + λn/μ)`, the reciprocal of the
//! gradient's Lipschitz constant. Accuracy is `O(μ)`; speed is not a goal.

use ndarray::Array2;

use super::pairs;
use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};
use crate::objective::objective_flat;
use crate::solution::{PrototypeSolution, Residuals};

const DECAY: f64 = 0.99;
const FLOOR_RATIO: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    pub iters: usize,
    /// Initial smoothing width `μ_0`.
    pub smoothing: f64,
}

impl ReferenceOptions {
    /// `μ_0 = 1e-2 · scale` and 200k iterations.
    pub fn for_dataset(dataset: &Dataset) -> Self {
        Self {
            iters: 200_000,
            smoothing: 1e-2 * dataset.scale(),
        }
    }
}

pub fn solve_reference(dataset: &Dataset, lambda: f64, options: ReferenceOptions) -> Result<PrototypeSolution> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
    }
    if options.iters == 0 {
        return Err(invalid("iters", "must be at least 1"));
    }
    if !(options.smoothing.is_finite() && options.smoothing > 0.0) {
        return Err(invalid("smoothing", "must be finite and > 0"));
    }
    let (n, d) = (dataset.n(), dataset.d());
    let x = dataset.flat();
    if lambda == 0.0 || n == 1 {
        return Ok(PrototypeSolution {
            prototypes: dataset.points().clone(),
            lambda,
            objective_value: 0.0,
            iterations: 0,
            converged: true,
            residuals: Residuals::default(),
        });
    }

    let floor = options.smoothing * FLOOR_RATIO;
    let mut mu = options.smoothing;
    let mut u = x.to_vec();
    let mut u_prev = u.clone();
    let mut look = u.clone();
    let mut grad = vec![0.0; n * d];
    let mut diff = vec![0.0; d];
    let mut last_step = f64::INFINITY;

    for iter in 1..=options.iters {
        let lipschitz = 1.0 + lambda * n as f64 / mu;
        let step = 1.0 / lipschitz;
        let root = lipschitz.sqrt();
        let momentum = (root - 1.0) / (root + 1.0);

        // gradient at the look-ahead point
        for c in 0..n * d {
            grad[c] = look[c] - x[c];
        }
        for (_, i, j) in pairs(n) {
            let mut nrm = 0.0;
            for c in 0..d {
                diff[c] = look[i * d + c] - look[j * d + c];
                nrm += diff[c] * diff[c];
            }
            let scale = lambda / nrm.sqrt().max(mu);
            for c in 0..d {
                grad[i * d + c] += scale * diff[c];
                grad[j * d + c] -= scale * diff[c];
            }
        }

        let mut restart = 0.0;
        let mut moved = 0.0;
        for c in 0..n * d {
            let next = look[c] - step * grad[c];
            restart += grad[c] * (next - u[c]);
            u_prev[c] = u[c];
            u[c] = next;
            moved += (next - u_prev[c]) * (next - u_prev[c]);
        }
        last_step = moved.sqrt();
        if !last_step.is_finite() {
            return Err(Error::NumericalFailure { iteration: iter });
        }
        // Gradient restart: drop momentum when it points uphill.
        let beta = if restart > 0.0 { 0.0 } else { momentum };
        for c in 0..n * d {
            look[c] = u[c] + beta * (u[c] - u_prev[c]);
        }
        mu = (mu * DECAY).max(floor);
    }

    let prototypes = Array2::from_shape_vec((n, d), u).expect("n × d iterate");
    let objective_value = objective_flat(x, prototypes.as_slice().expect("owned"), d, lambda);
    Ok(PrototypeSolution {
        prototypes,
        lambda,
        objective_value,
        iterations: options.iters,
        converged: true,
        residuals: Residuals {
            primal: last_step,
            dual: 0.0,
        },
    })
}
