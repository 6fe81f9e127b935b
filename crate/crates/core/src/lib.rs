//! Sum-of-norms ("convex") clustering with certification of the structure of
//! its solutions.
//!
//! The objective is
//!
//! ```text
//! f(U) = ½ Σ_i ‖u_i − x_i‖² + λ Σ_{j<i} ‖u_i − u_j‖
//! ```
//!
//! Points whose prototypes `u_i` coincide form a cluster. Besides the solver,
//! the crate checks properties every optimum must satisfy: the directional
//! derivative is nonnegative in every direction, each cluster sits in a ball
//! of radius `λ(n_l − 1)` around its mean, distinct balls are more than `2λ`
//! apart, cluster hulls have disjoint interiors, and a within-cluster dual
//! certificate exists.

pub mod certify;
pub mod config;
pub mod dataset;
pub mod datagen;
pub mod error;
pub mod objective;
pub mod hyperparam;
pub mod partition;
pub mod solution;
pub mod solver;

pub use certify::{certify, CertReport, CertifyOptions};
pub use config::SolverConfig;
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use objective::objective;
pub use partition::Partition;
pub use solution::{PrototypeSolution, Residuals};
pub use solver::{solve_admm, solve_reference, ReferenceOptions};
