use serde::{Deserialize, Serialize};

use super::directions::{check_shapes, pair_directions};
use super::report::CheckResult;
use crate::dataset::{dist, Dataset};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::solution::PrototypeSolution;

/// Ball of radius `λ(n_l − 1)` about the data mean of cluster `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBall {
    pub cluster_index: usize,
    pub center: Vec<f64>,
    pub radius: f64,
}

pub fn bounding_balls(dataset: &Dataset, partition: &Partition, lambda: f64) -> Result<Vec<BoundingBall>> {
    if partition.n() != dataset.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("partition of {} points", dataset.n()),
            found: format!("{}", partition.n()),
        });
    }
    let means = Partition::from_data_labels(dataset, partition.labels())?;
    Ok((0..partition.k())
        .map(|l| BoundingBall {
            cluster_index: l,
            center: means.centroid(l).to_vec(),
            radius: lambda * (partition.sizes()[l] - 1) as f64,
        })
        .collect())
}

/// Passes iff every point is within `tol` of its cluster's ball. Margin is
/// the worst `‖x_i − c_l‖ − r_l`; the witness is that point.
pub fn check_containment(dataset: &Dataset, partition: &Partition, balls: &[BoundingBall], tol: f64) -> CheckResult {
    let mut worst = (f64::NEG_INFINITY, 0);
    for i in 0..dataset.n() {
        let ball = &balls[partition.label(i)];
        let excess = dist(dataset.row(i), &ball.center) - ball.radius;
        if excess > worst.0 {
            worst = (excess, i);
        }
    }
    CheckResult::new("containment", worst.0 <= tol, Some(worst.0), vec![worst.1])
}

/// Passes iff every pair of balls is separated by more than `2λ − tol`.
/// Margin is the smallest `‖c_l − c_o‖ − r_l − r_o − 2λ`; the witness holds
/// the two cluster indices. Vacuous for fewer than two clusters.
pub fn check_gaps(balls: &[BoundingBall], lambda: f64, tol: f64) -> CheckResult {
    if balls.len() < 2 {
        return CheckResult::new("gaps", true, None, Vec::new());
    }
    let mut worst = (f64::INFINITY, 0, 0);
    for (a, p) in balls.iter().enumerate() {
        for q in &balls[..a] {
            let gap = dist(&p.center, &q.center) - p.radius - q.radius - 2.0 * lambda;
            if gap < worst.0 {
                worst = (gap, q.cluster_index, p.cluster_index);
            }
        }
    }
    CheckResult::new("gaps", worst.0 > -tol, Some(worst.0), vec![worst.1, worst.2])
}

/// Compares the two expressions for a ball center: the cluster data mean and
/// `m_l + λE_l`. Margin is the largest distance between them; the witness
/// is the cluster index.
pub fn check_center_consistency(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    partition: &Partition,
    lambda: f64,
    tol: f64,
) -> Result<CheckResult> {
    check_shapes(dataset, solution, partition)?;
    let balls = bounding_balls(dataset, partition, lambda)?;
    let directions = pair_directions(partition);
    let mut worst = (0.0, 0);
    for (l, ball) in balls.iter().enumerate() {
        let shifted: Vec<f64> = partition
            .centroid(l)
            .iter()
            .zip(directions.cluster_aggregate(l))
            .map(|(m, e)| m + lambda * e)
            .collect();
        let gap = dist(&shifted, &ball.center);
        if gap > worst.0 {
            worst = (gap, l);
        }
    }
    Ok(CheckResult::new(
        "center_consistency",
        worst.0 <= tol,
        Some(worst.0),
        vec![worst.1],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_ball() {
        let ds = Dataset::from_rows(&[[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let p = Partition::from_data_labels(&ds, &[0, 0]).unwrap();
        let balls = bounding_balls(&ds, &p, 1.2).unwrap();
        assert_eq!(balls[0].center, vec![1.0, 0.0]);
        assert!((balls[0].radius - 1.2).abs() < 1e-15);
        assert!(check_containment(&ds, &p, &balls, 1e-9).pass);
    }

    #[test]
    fn singleton_and_single_cluster_balls() {
        let ds = Dataset::from_rows(&[[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]).unwrap();
        let singles = Partition::from_data_labels(&ds, &[0, 1, 2]).unwrap();
        for (i, b) in bounding_balls(&ds, &singles, 0.4).unwrap().iter().enumerate() {
            assert_eq!(b.radius, 0.0);
            assert_eq!(b.center, ds.row(i));
        }
        let one = Partition::from_data_labels(&ds, &[0, 0, 0]).unwrap();
        let b = &bounding_balls(&ds, &one, 0.4).unwrap()[0];
        assert!((b.radius - 0.8).abs() < 1e-15);
        assert_eq!(b.center, vec![1.0, 1.0]);
    }

    #[test]
    fn containment_detects_far_member() {
        let ds = Dataset::from_scalars(&[0.0, 0.1, 5.0]).unwrap();
        let p = Partition::from_data_labels(&ds, &[0, 0, 0]).unwrap();
        let balls = bounding_balls(&ds, &p, 0.1).unwrap();
        let r = check_containment(&ds, &p, &balls, 1e-9);
        assert!(!r.pass);
        assert!(r.margin.unwrap() > 0.0);
        assert_eq!(r.witness_indices, vec![2]);
    }

    #[test]
    fn gaps_for_two_point_solution() {
        let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
        let p = Partition::from_data_labels(&ds, &[0, 1]).unwrap();
        let balls = bounding_balls(&ds, &p, 0.2).unwrap();
        let r = check_gaps(&balls, 0.2, 1e-9);
        assert!(r.pass);
        assert!((r.margin.unwrap() - 0.6).abs() < 1e-12);
        assert!(check_gaps(&balls[..1], 0.2, 1e-9).pass);
        assert!(!check_gaps(&balls, 0.6, 1e-9).pass);
    }
}
