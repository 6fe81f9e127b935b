//! Minimizers of the sum-of-norms clustering objective.
//!
//! [`solve_admm`] is the production solver. [`solve_reference`] is a slow,
//! independent smoothed-gradient method kept for cross-checking.

mod admm;
mod polish;
mod reference;

pub use admm::{solve_admm, solve_admm_warm, AdmmState};
pub use polish::polish_centroids;
pub use reference::{solve_reference, ReferenceOptions};

/// Number of unordered pairs among `n` points.
pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Iterate unordered pairs `(i, j)`, `i < j`, in lexicographic order together
/// with their flat pair index.
pub(crate) fn pairs(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n)
        .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
        .enumerate()
        .map(|(p, (i, j))| (p, i, j))
}
