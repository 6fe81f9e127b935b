//! Checks that a `(dataset, solution, λ)` triple has the structure every
//! optimum must have.
//!
//! * [`probe_optimality`]: the one-sided directional derivative of `f` at `Ū`
//!   is nonnegative along random and structured directions.
//! * [`bounding_balls`], [`check_containment`], [`check_gaps`]: each cluster
//!   lies in the ball of radius `λ(n_l − 1)` about its data mean, and distinct
//!   balls are more than `2λ` apart.
//! * [`check_center_consistency`]: `m_l + λE_l` equals the cluster mean.
//! * [`check_convexity`]: no cross-cluster swap of prototypes lowers the
//!   squared loss, and in the plane the cluster hulls have disjoint interiors.
//! * [`dual_certificate`]: antisymmetric within-cluster vectors `z_ij` with
//!   `‖z_ij‖ ≤ λ` and `Σ_j z_ij = v_i`. Their existence is necessary and
//!   sufficient for `Ū` to be the optimum for this data.

mod balls;
mod convexity;
mod directions;
mod dual;
mod hull;
mod report;
mod witness;

pub use balls::{bounding_balls, check_center_consistency, check_containment, check_gaps, BoundingBall};
pub use convexity::{check_convexity, ConvexityResult};
pub use directions::{
    directional_derivative, pair_directions, probe_optimality, DirectionVector, PairDirections, ProbeOutcome,
};
pub use dual::{dual_certificate, same_solution_probe, Certificate};
pub use hull::{convex_hull, hull_interiors_overlap};
pub use report::{certify, certify_partition, CertReport, Certification, CheckResult};
pub use witness::construct_boundary_dataset;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Absolute tolerances used by the checks. [`CertifyOptions::for_dataset`]
/// scales them by `max(1, ‖X‖_F)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Containment, gap, swap and certificate residual tolerance.
    pub cert_tol: f64,
    /// Directional derivative and center-consistency tolerance.
    pub probe_tol: f64,
    /// Random directions drawn by the optimality probe.
    pub num_probes: usize,
    /// Iteration budget for the certificate search.
    pub cert_iters: usize,
    pub seed: u64,
}

impl CertifyOptions {
    pub fn for_dataset(dataset: &Dataset) -> Self {
        let scale = dataset.scale();
        Self {
            cert_tol: 1e-5 * scale,
            probe_tol: 1e-6 * scale,
            num_probes: 256,
            cert_iters: 5000,
            seed: 0,
        }
    }
}
