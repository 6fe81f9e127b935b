//! Lloyd's algorithm from k-means++ seeds, best of several restarts.

use rand::Rng;
use rayon::prelude::*;

use super::rng::{substream, Rng64};
use crate::dataset::{dist_sq, Dataset};
use crate::error::{invalid, Result};
use crate::partition::Partition;

const RESTARTS: u64 = 10;

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub partition: Partition,
    /// Within-cluster sum of squares of the returned partition.
    pub inertia: f64,
    /// Inertia after each assignment step of the winning restart.
    pub history: Vec<f64>,
    pub restart: usize,
}

pub fn kmeans(dataset: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<Partition> {
    kmeans_fit(dataset, k, seed, max_iters).map(|fit| fit.partition)
}

/// Restarts run in parallel; the lowest inertia wins, ties to the lowest
/// restart index.
pub fn kmeans_fit(dataset: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<KMeansFit> {
    let n = dataset.n();
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    if max_iters == 0 {
        return Err(invalid("max_iters", "must be at least 1"));
    }
    let runs: Vec<(Vec<usize>, Vec<f64>)> = (0..RESTARTS)
        .into_par_iter()
        .map(|r| lloyd(dataset, k, &mut substream(seed, r), max_iters))
        .collect();
    let (restart, (labels, history)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            let fa = *a.1.last().expect("at least one step");
            let fb = *b.1.last().expect("at least one step");
            fa.total_cmp(&fb).then(ia.cmp(ib))
        })
        .expect("RESTARTS > 0");
    let inertia = *history.last().expect("at least one step");
    Ok(KMeansFit {
        partition: Partition::from_data_labels(dataset, &labels)?,
        inertia,
        history,
        restart,
    })
}

fn lloyd(dataset: &Dataset, k: usize, rng: &mut Rng64, max_iters: usize) -> (Vec<usize>, Vec<f64>) {
    let (n, d) = (dataset.n(), dataset.d());
    let mut centers = seed_plus_plus(dataset, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    for _ in 0..max_iters {
        let mut changed = false;
        let mut inertia = 0.0;
        for i in 0..n {
            let (best, best_d) = nearest(dataset.row(i), &centers, d);
            inertia += best_d;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed {
            break;
        }
        // update step
        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for c in 0..d {
                sums[labels[i] * d + c] += dataset.row(i)[c];
            }
        }
        for l in 0..k {
            if counts[l] == 0 {
                // An empty cluster takes the point worst served by its center.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = dist_sq(dataset.row(a), &centers[labels[a] * d..(labels[a] + 1) * d]);
                        let db = dist_sq(dataset.row(b), &centers[labels[b] * d..(labels[b] + 1) * d]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("n >= 1");
                centers[l * d..(l + 1) * d].copy_from_slice(dataset.row(far));
            } else {
                for c in 0..d {
                    centers[l * d + c] = sums[l * d + c] / counts[l] as f64;
                }
            }
        }
    }
    let labels = labels.into_iter().map(|l| l.min(k - 1)).collect();
    (labels, history)
}

fn seed_plus_plus(dataset: &Dataset, k: usize, rng: &mut Rng64) -> Vec<f64> {
    let (n, d) = (dataset.n(), dataset.d());
    let mut centers = Vec::with_capacity(k * d);
    centers.extend_from_slice(dataset.row(rng.gen_range(0..n)));
    let mut weight: Vec<f64> = (0..n).map(|i| dist_sq(dataset.row(i), &centers[..d])).collect();
    for _ in 1..k {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in weight.iter().enumerate() {
                if target < *w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        let start = centers.len();
        centers.extend_from_slice(dataset.row(pick));
        for (i, w) in weight.iter_mut().enumerate() {
            *w = w.min(dist_sq(dataset.row(i), &centers[start..start + d]));
        }
    }
    centers
}

fn nearest(point: &[f64], centers: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (l, c) in centers.chunks_exact(d).enumerate() {
        let dd = dist_sq(point, c);
        if dd < best.1 {
            best = (l, dd);
        }
    }
    best
}
