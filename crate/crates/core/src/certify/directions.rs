//! Directional derivatives of the objective at a candidate optimum.
//!
//! Along `ε ∈ R^{nd}` the one-sided derivative at `Ū` is
//!
//! ```text
//! Σ_i ⟨ū_i − x_i + λE_i, ε_i⟩ + λ Σ_{j<i, ū_i = ū_j} ‖ε_i − ε_j‖
//! ```
//!
//! with `E_i` the sum of unit vectors `e_ij` from every prototype in another
//! cluster toward `ū_i`. `Ū` is optimal iff this is nonnegative for all `ε`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::{norm, Dataset};
use crate::datagen::rng::substream;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::solution::PrototypeSolution;

/// Per-point blocks `ε_i` of a direction in `R^{nd}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionVector {
    components: Vec<f64>,
    n: usize,
    d: usize,
    norm: f64,
}

impl DirectionVector {
    pub fn new(n: usize, d: usize, components: Vec<f64>) -> Result<Self> {
        if components.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: format!("{} components", n * d),
                found: format!("{}", components.len()),
            });
        }
        let norm = norm(&components);
        Ok(Self { components, n, d, norm })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            components: vec![0.0; n * d],
            n,
            d,
            norm: 0.0,
        }
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.components[i * self.d..(i + 1) * self.d]
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Stacked Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            components: self.components.iter().map(|v| v * factor).collect(),
            n: self.n,
            d: self.d,
            norm: self.norm * factor.abs(),
        }
    }

    fn normalized(components: Vec<f64>, n: usize, d: usize) -> Option<Self> {
        let len = norm(&components);
        (len > 0.0).then(|| Self {
            components: components.into_iter().map(|v| v / len).collect(),
            n,
            d,
            norm: 1.0,
        })
    }
}

/// Unit vectors between clusters, computed from the cluster centroids so
/// that `E_i` is identical for every member of a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDirections {
    labels: Vec<usize>,
    k: usize,
    d: usize,
    /// `k × k × d`; entry `(l, o)` is the unit vector from `m_o` toward `m_l`.
    cluster_e: Vec<f64>,
    /// `k × d` aggregate `E` per cluster.
    cluster_sum: Vec<f64>,
}

impl PairDirections {
    /// `e_ij`, or `None` when `i` and `j` share a cluster.
    pub fn e(&self, i: usize, j: usize) -> Option<&[f64]> {
        let (l, o) = (self.labels[i], self.labels[j]);
        (l != o).then(|| {
            let start = (l * self.k + o) * self.d;
            &self.cluster_e[start..start + self.d]
        })
    }

    /// `E_i`.
    pub fn aggregate(&self, i: usize) -> &[f64] {
        self.cluster_aggregate(self.labels[i])
    }

    pub fn cluster_aggregate(&self, l: usize) -> &[f64] {
        &self.cluster_sum[l * self.d..(l + 1) * self.d]
    }
}

pub fn pair_directions(partition: &Partition) -> PairDirections {
    let k = partition.k();
    let d = partition.centroids().ncols();
    let mut cluster_e = vec![0.0; k * k * d];
    let mut cluster_sum = vec![0.0; k * d];
    for l in 0..k {
        for o in 0..k {
            if l == o {
                continue;
            }
            let diff: Vec<f64> = partition
                .centroid(l)
                .iter()
                .zip(partition.centroid(o))
                .map(|(a, b)| a - b)
                .collect();
            let len = norm(&diff);
            if len == 0.0 {
                continue;
            }
            let weight = partition.sizes()[o] as f64;
            for c in 0..d {
                let e = diff[c] / len;
                cluster_e[(l * k + o) * d + c] = e;
                cluster_sum[l * d + c] += weight * e;
            }
        }
    }
    PairDirections {
        labels: partition.labels().to_vec(),
        k,
        d,
        cluster_e,
        cluster_sum,
    }
}

/// The stationarity vector `w_i = ū_i − x_i + λE_i` for every point.
pub(crate) fn stationarity(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    directions: &PairDirections,
    lambda: f64,
) -> Vec<f64> {
    let (n, d) = (dataset.n(), dataset.d());
    let mut w = Vec::with_capacity(n * d);
    for i in 0..n {
        let (u, x, e) = (solution.prototype(i), dataset.row(i), directions.aggregate(i));
        w.extend((0..d).map(|c| u[c] - x[c] + lambda * e[c]));
    }
    w
}

pub fn directional_derivative(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    partition: &Partition,
    lambda: f64,
    eps: &DirectionVector,
) -> Result<f64> {
    check_shapes(dataset, solution, partition)?;
    if eps.n != dataset.n() || eps.d != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} direction", dataset.n(), dataset.d()),
            found: format!("{}x{}", eps.n, eps.d),
        });
    }
    let directions = pair_directions(partition);
    let w = stationarity(dataset, solution, &directions, lambda);
    Ok(derivative_with(&w, &partition.clusters(), lambda, eps))
}

fn derivative_with(w: &[f64], clusters: &[Vec<usize>], lambda: f64, eps: &DirectionVector) -> f64 {
    let d = eps.d;
    let linear: f64 = w.iter().zip(&eps.components).map(|(a, b)| a * b).sum();
    let mut within = 0.0;
    for members in clusters {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[..a] {
                let (ei, ej) = (eps.block(i), eps.block(j));
                within += (0..d).map(|c| (ei[c] - ej[c]) * (ei[c] - ej[c])).sum::<f64>().sqrt();
            }
        }
    }
    linear + lambda * within
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    /// Smallest derivative over all unit directions tried.
    pub minimum: f64,
    /// Points carrying the minimizing direction (all points for a random
    /// direction, one point for a single-block direction, a cluster for a
    /// cluster-constant direction).
    pub witness: Vec<usize>,
    pub directions_tried: usize,
}

/// Minimum derivative over `num_probes` seeded random unit directions plus
/// the structured ones: for each point the block direction `−w_i/‖w_i‖`, and
/// for each cluster the constant direction `−Σ_{i∈l} w_i` on its members.
pub fn probe_optimality(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    partition: &Partition,
    lambda: f64,
    num_probes: usize,
    seed: u64,
) -> Result<ProbeOutcome> {
    check_shapes(dataset, solution, partition)?;
    let (n, d) = (dataset.n(), dataset.d());
    let directions = pair_directions(partition);
    let w = stationarity(dataset, solution, &directions, lambda);
    let clusters = partition.clusters();

    let mut structured: Vec<(DirectionVector, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let mut comp = vec![0.0; n * d];
        for c in 0..d {
            comp[i * d + c] = -w[i * d + c];
        }
        if let Some(dir) = DirectionVector::normalized(comp, n, d) {
            structured.push((dir, vec![i]));
        }
    }
    for members in &clusters {
        let mut sum = vec![0.0; d];
        for &i in members {
            for c in 0..d {
                sum[c] += w[i * d + c];
            }
        }
        let mut comp = vec![0.0; n * d];
        for &i in members {
            for c in 0..d {
                comp[i * d + c] = -sum[c];
            }
        }
        if let Some(dir) = DirectionVector::normalized(comp, n, d) {
            structured.push((dir, members.clone()));
        }
    }

    let all: Vec<usize> = (0..n).collect();
    let random_min = (0..num_probes as u64)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = substream(seed, r);
            let comp: Vec<f64> = (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            DirectionVector::normalized(comp, n, d).map(|dir| (derivative_with(&w, &clusters, lambda, &dir), r))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut outcome = ProbeOutcome {
        minimum: f64::INFINITY,
        witness: Vec::new(),
        directions_tried: num_probes + structured.len(),
    };
    if let Some((value, _)) = random_min {
        outcome.minimum = value;
        outcome.witness = all;
    }
    for (dir, members) in &structured {
        let value = derivative_with(&w, &clusters, lambda, dir);
        if value < outcome.minimum {
            outcome.minimum = value;
            outcome.witness = members.clone();
        }
    }
    if !outcome.minimum.is_finite() {
        // Every candidate direction vanished: the zero direction is all that
        // was probed.
        outcome.minimum = 0.0;
    }
    Ok(outcome)
}

pub(crate) fn check_shapes(dataset: &Dataset, solution: &PrototypeSolution, partition: &Partition) -> Result<()> {
    if solution.n() != dataset.n() || solution.d() != dataset.d() || partition.n() != dataset.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", dataset.n(), dataset.d()),
            found: format!(
                "solution {}x{}, partition of {} points",
                solution.n(),
                solution.d(),
                partition.n()
            ),
        });
    }
    if partition.centroids().ncols() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("centroids in R^{}", dataset.d()),
            found: format!("R^{}", partition.centroids().ncols()),
        });
    }
    Ok(())
}
