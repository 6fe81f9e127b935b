use super::hull::{convex_hull, hull_interiors_overlap};
use super::report::CheckResult;
use crate::dataset::{dist_sq, Dataset};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityResult {
    /// For all `i ∈ V_l`, `j ∈ V_o`, `l ≠ o`:
    /// `‖x_i − m_l‖² + ‖x_j − m_o‖² ≤ ‖x_i − m_o‖² + ‖x_j − m_l‖² + tol`.
    /// Margin is the largest violation; the witness is `[i, j]`.
    pub swap: CheckResult,
    /// Planar data only: cluster hulls have pairwise disjoint interiors.
    /// Margin counts overlapping hull pairs; the witness is the first
    /// overlapping pair of cluster indices. Skipped (pass, no margin) when
    /// `d ≠ 2`.
    pub hull: CheckResult,
}

impl ConvexityResult {
    pub fn pass(&self) -> bool {
        self.swap.pass && self.hull.pass
    }
}

pub fn check_convexity(dataset: &Dataset, partition: &Partition, tol: f64) -> ConvexityResult {
    ConvexityResult {
        swap: swap_test(dataset, partition, tol),
        hull: hull_test(dataset, partition),
    }
}

fn swap_test(dataset: &Dataset, partition: &Partition, tol: f64) -> CheckResult {
    let n = dataset.n();
    let k = partition.k();
    // squared distance from every point to every centroid
    let to_centroid: Vec<f64> = (0..n)
        .flat_map(|i| (0..k).map(move |l| (i, l)))
        .map(|(i, l)| dist_sq(dataset.row(i), partition.centroid(l)))
        .collect();
    let sq = |i: usize, l: usize| to_centroid[i * k + l];
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for i in 0..n {
        let l = partition.label(i);
        for j in 0..i {
            let o = partition.label(j);
            if l == o {
                continue;
            }
            let excess = sq(i, l) + sq(j, o) - sq(i, o) - sq(j, l);
            if excess > worst.0 {
                worst = (excess, vec![i, j]);
            }
        }
    }
    if worst.1.is_empty() {
        return CheckResult::new("convexity_swap", true, None, Vec::new());
    }
    CheckResult::new("convexity_swap", worst.0 <= tol, Some(worst.0), worst.1)
}

fn hull_test(dataset: &Dataset, partition: &Partition) -> CheckResult {
    if dataset.d() != 2 {
        return CheckResult::new("convexity_hull", true, None, Vec::new());
    }
    let hulls: Vec<Vec<[f64; 2]>> = partition
        .clusters()
        .iter()
        .map(|members| {
            let pts: Vec<[f64; 2]> = members.iter().map(|&i| [dataset.row(i)[0], dataset.row(i)[1]]).collect();
            convex_hull(&pts)
        })
        .collect();
    let mut overlaps = 0usize;
    let mut witness = Vec::new();
    for l in 0..hulls.len() {
        for o in 0..l {
            if hull_interiors_overlap(&hulls[l], &hulls[o]) {
                overlaps += 1;
                if witness.is_empty() {
                    witness = vec![o, l];
                }
            }
        }
    }
    CheckResult::new("convexity_hull", overlaps == 0, Some(overlaps as f64), witness)
}
