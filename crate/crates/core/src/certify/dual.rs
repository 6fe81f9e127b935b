//! Within-cluster dual certificate.
//!
//! Fix `Ū`. With `c_l = m_l + λE_l` and `v_i = c_l − x_i`, `Ū` is optimal for
//! the data `X` iff, in every cluster, there are vectors `z_ij = −z_ji` with
//! `‖z_ij‖ ≤ λ` and `Σ_{j≠i} z_ij = v_i`. Summing the balance equations
//! shows that `c_l` must then be the cluster mean.
//!
//! The search alternates a projection onto the balance subspace with a
//! projection onto the product of norm balls, accelerated with Nesterov
//! momentum and gradient restarts. For a cluster of size `q` the balance
//! projection has the closed form `z_ij −= (r_i − r_j)/q`, where `r` is the
//! balance residual.

use std::collections::HashMap;

use super::directions::{check_shapes, pair_directions};
use super::CertifyOptions;
use crate::dataset::{norm, Dataset};
use crate::error::{invalid, Error, Result};
use crate::partition::Partition;
use crate::solution::PrototypeSolution;

/// How often (in iterations) the balance residual is evaluated.
const CHECK_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    z: HashMap<(usize, usize), Vec<f64>>,
    pub feasible: bool,
    /// `max(‖z_ij‖ − λ, 0)` over stored pairs.
    pub max_norm_violation: f64,
    /// `max_i ‖v_i − Σ_j z_ij‖`.
    pub max_balance_residual: f64,
    pub iterations: usize,
    /// Point with the largest balance residual.
    pub worst_point: usize,
}

impl Certificate {
    /// `z_ij` for a within-cluster pair; `z_ji = −z_ij` by construction.
    pub fn z(&self, i: usize, j: usize) -> Option<Vec<f64>> {
        if i < j {
            self.z.get(&(i, j)).cloned()
        } else {
            self.z.get(&(j, i)).map(|v| v.iter().map(|x| -x).collect())
        }
    }

    pub fn pair_count(&self) -> usize {
        self.z.len()
    }
}

/// Search for a certificate that `solution` is optimal for `dataset`.
///
/// A `false` result after `cert_iters` iterations is not a proof of
/// infeasibility: the residuals tell a near miss from a clear violation.
pub fn dual_certificate(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    partition: &Partition,
    lambda: f64,
    options: &CertifyOptions,
) -> Result<Certificate> {
    check_shapes(dataset, solution, partition)?;
    if options.cert_iters == 0 {
        return Err(invalid("cert_iters", "must be at least 1"));
    }
    let d = dataset.d();
    let directions = pair_directions(partition);
    let mut cert = Certificate {
        z: HashMap::new(),
        feasible: false,
        max_norm_violation: 0.0,
        max_balance_residual: 0.0,
        iterations: 0,
        worst_point: 0,
    };
    for (l, members) in partition.clusters().iter().enumerate() {
        let center: Vec<f64> = partition
            .centroid(l)
            .iter()
            .zip(directions.cluster_aggregate(l))
            .map(|(m, e)| m + lambda * e)
            .collect();
        let v: Vec<f64> = members
            .iter()
            .flat_map(|&i| center.iter().zip(dataset.row(i)).map(|(c, x)| c - x))
            .collect();
        let fit = solve_cluster(&v, members.len(), d, lambda, options.cert_iters, options.cert_tol);
        cert.iterations = cert.iterations.max(fit.iterations);
        cert.max_norm_violation = cert.max_norm_violation.max(fit.norm_violation);
        if fit.balance >= cert.max_balance_residual {
            cert.max_balance_residual = fit.balance;
            cert.worst_point = members[fit.worst];
        }
        let q = members.len();
        let mut p = 0;
        for a in 0..q {
            for b in a + 1..q {
                cert.z.insert((members[a], members[b]), fit.z[p * d..(p + 1) * d].to_vec());
                p += 1;
            }
        }
    }
    cert.feasible = cert.max_norm_violation <= options.cert_tol && cert.max_balance_residual <= options.cert_tol;
    Ok(cert)
}

/// Whether `candidate` has the same optimum `solution`. The cluster
/// structure, `m_l` and `E_l` come from `solution`; only `v` changes.
pub fn same_solution_probe(
    candidate: &Dataset,
    solution: &PrototypeSolution,
    partition: &Partition,
    lambda: f64,
    options: &CertifyOptions,
) -> Result<bool> {
    if candidate.n() != solution.n() || candidate.d() != solution.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", solution.n(), solution.d()),
            found: format!("{}x{}", candidate.n(), candidate.d()),
        });
    }
    Ok(dual_certificate(candidate, solution, partition, lambda, options)?.feasible)
}

struct ClusterFit {
    z: Vec<f64>,
    balance: f64,
    norm_violation: f64,
    worst: usize,
    iterations: usize,
}

/// Minimize `½‖Bz − v‖²` over `‖z_p‖ ≤ λ` for the complete graph on `q`
/// nodes, where `(Bz)_i = Σ_{j>i} z_ij − Σ_{j<i} z_ji`.
fn solve_cluster(v: &[f64], q: usize, d: usize, lambda: f64, iters: usize, tol: f64) -> ClusterFit {
    let npairs = q * (q - 1) / 2;
    let mut z = vec![0.0; npairs * d];
    let mut z_prev = z.clone();
    let mut look = z.clone();
    let mut residual = vec![0.0; q * d];
    let step = 1.0 / q as f64;
    let mut t = 1.0f64;
    let mut iterations = 0;

    let balance = |z: &[f64], out: &mut [f64]| {
        for (o, vi) in out.iter_mut().zip(v) {
            *o = -vi;
        }
        let mut p = 0;
        for a in 0..q {
            for b in a + 1..q {
                for c in 0..d {
                    out[a * d + c] += z[p * d + c];
                    out[b * d + c] -= z[p * d + c];
                }
                p += 1;
            }
        }
    };
    let worst_of = |res: &[f64]| -> (f64, usize) {
        (0..q)
            .map(|i| (norm(&res[i * d..(i + 1) * d]), i))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
    };

    balance(&z, &mut residual);
    let (mut best, mut worst) = worst_of(&residual);
    if npairs > 0 && best > tol * 1e-3 {
        for iter in 1..=iters {
            iterations = iter;
            balance(&look, &mut residual);
            z_prev.copy_from_slice(&z);
            let mut p = 0;
            let mut uphill = 0.0;
            for a in 0..q {
                for b in a + 1..q {
                    let block = &mut z[p * d..(p + 1) * d];
                    for c in 0..d {
                        let g = residual[a * d + c] - residual[b * d + c];
                        block[c] = look[p * d + c] - step * g;
                    }
                    let len = norm(block);
                    if len > lambda {
                        let s = lambda / len;
                        block.iter_mut().for_each(|x| *x *= s);
                    }
                    for c in 0..d {
                        let g = residual[a * d + c] - residual[b * d + c];
                        uphill += g * (block[c] - z_prev[p * d + c]);
                    }
                    p += 1;
                }
            }
            let (beta, t_next) = if uphill > 0.0 {
                (0.0, 1.0)
            } else {
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                ((t - 1.0) / t_next, t_next)
            };
            t = t_next;
            for (lk, (zn, zp)) in look.iter_mut().zip(z.iter().zip(&z_prev)) {
                *lk = zn + beta * (zn - zp);
            }
            if iter % CHECK_EVERY == 0 || iter == iters {
                balance(&z, &mut residual);
                (best, worst) = worst_of(&residual);
                if best <= tol * 1e-3 {
                    break;
                }
            }
        }
    }
    let norm_violation = z
        .chunks_exact(d.max(1))
        .map(|b| (norm(b) - lambda).max(0.0))
        .fold(0.0, f64::max);
    ClusterFit {
        z,
        balance: best,
        norm_violation,
        worst,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn opts() -> CertifyOptions {
        CertifyOptions {
            cert_tol: 1e-7,
            probe_tol: 1e-8,
            num_probes: 16,
            cert_iters: 20_000,
            seed: 0,
        }
    }

    fn fused_pair(lambda: f64) -> (Dataset, PrototypeSolution, Partition) {
        let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
        let sol = PrototypeSolution::from_prototypes(&ds, array![[0.5], [0.5]], lambda).unwrap();
        let p = sol.partition(1e-9);
        (ds, sol, p)
    }

    #[test]
    fn fused_pair_feasible_above_threshold() {
        let (ds, sol, p) = fused_pair(0.6);
        let cert = dual_certificate(&ds, &sol, &p, 0.6, &opts()).unwrap();
        assert!(cert.feasible, "{cert:?}");
        let z = cert.z(0, 1).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-7);
        assert_eq!(cert.z(1, 0).unwrap(), vec![-z[0]]);
    }

    #[test]
    fn fused_pair_infeasible_below_threshold() {
        let (ds, sol, p) = fused_pair(0.4);
        let cert = dual_certificate(&ds, &sol, &p, 0.4, &opts()).unwrap();
        assert!(!cert.feasible);
        assert!(cert.max_balance_residual > 0.09, "{cert:?}");
    }

    #[test]
    fn singletons_need_stationary_prototypes() {
        let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
        let good = PrototypeSolution::from_prototypes(&ds, array![[0.2], [0.8]], 0.2).unwrap();
        let p = good.partition(1e-9);
        let cert = dual_certificate(&ds, &good, &p, 0.2, &opts()).unwrap();
        assert!(cert.feasible);
        assert_eq!(cert.pair_count(), 0);

        let bad = PrototypeSolution::from_prototypes(&ds, array![[0.25], [0.8]], 0.2).unwrap();
        let p = bad.partition(1e-9);
        let cert = dual_certificate(&ds, &bad, &p, 0.2, &opts()).unwrap();
        assert!(!cert.feasible);
        assert_eq!(cert.worst_point, 0);
        assert!((cert.max_balance_residual - 0.05).abs() < 1e-12);
    }

    #[test]
    fn three_point_boundary_witness() {
        let ds = Dataset::from_scalars(&[-0.2, 0.1, 0.1]).unwrap();
        let sol = PrototypeSolution::from_prototypes(&ds, array![[0.0], [0.0], [0.0]], 0.1).unwrap();
        let p = sol.partition(1e-9);
        let cert = dual_certificate(&ds, &sol, &p, 0.1, &opts()).unwrap();
        assert!(cert.feasible, "{cert:?}");
        let z12 = cert.z(0, 1).unwrap()[0];
        let z13 = cert.z(0, 2).unwrap()[0];
        let z23 = cert.z(1, 2).unwrap()[0];
        // v = c − x = (0.2, −0.1, −0.1)
        assert!((z12 - 0.1).abs() < 1e-6 && (z13 - 0.1).abs() < 1e-6 && z23.abs() < 1e-6);
    }

    #[test]
    fn same_solution_under_within_cluster_swap() {
        let (ds, sol, p) = fused_pair(0.6);
        let swapped = Dataset::from_scalars(&[1.0, 0.0]).unwrap();
        assert!(same_solution_probe(&swapped, &sol, &p, 0.6, &opts()).unwrap());
        assert!(same_solution_probe(&ds, &sol, &p, 0.6, &opts()).unwrap());
        let moved = Dataset::from_scalars(&[-1.0, 1.0]).unwrap();
        assert!(!same_solution_probe(&moved, &sol, &p, 0.6, &opts()).unwrap());
    }
}
