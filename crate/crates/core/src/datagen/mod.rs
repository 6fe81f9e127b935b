//! Synthetic datasets and the two baseline clusterers used for comparison.

pub mod fixtures;
mod generators;
mod kmeans;
pub mod rng;
mod ward;

pub use generators::{add_interior_samples, generate, Ball, GeneratedData, GeneratorKind, GeneratorSpec, NOISE_LABEL};
pub use kmeans::{kmeans, kmeans_fit, KMeansFit};
pub use ward::{ward_agglomerative, ward_linkage, Dendrogram, Merge};
