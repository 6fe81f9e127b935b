//! Agglomerative clustering with Ward linkage.
//!
//! Dissimilarities start as squared Euclidean distances and are updated with
//! the Lance–Williams recurrence
//! `d(k, i∪j) = ((n_i+n_k) d(k,i) + (n_j+n_k) d(k,j) − n_k d(i,j)) / (n_i+n_j+n_k)`.
//! Clusters are named by their smallest member; ties go to the pair with the
//! smallest names.

use crate::dataset::{dist_sq, Dataset};
use crate::error::{invalid, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Names (smallest member index) of the two merged clusters, `a < b`.
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// Full merge sequence, `n − 1` merges.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Labels after applying the first `n − k` merges.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.n {
            return Err(invalid("k", format!("need 1 <= k <= n = {}, got {k}", self.n)));
        }
        let mut owner: Vec<usize> = (0..self.n).collect();
        for m in &self.merges[..self.n - k] {
            for o in owner.iter_mut() {
                if *o == m.b {
                    *o = m.a;
                }
            }
        }
        Ok(owner)
    }
}

pub fn ward_linkage(dataset: &Dataset) -> Dendrogram {
    let n = dataset.n();
    let mut dis = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let v = dist_sq(dataset.row(i), dataset.row(j));
            dis[i * n + j] = v;
            dis[j * n + i] = v;
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..n {
            if !active[a] {
                continue;
            }
            for b in a + 1..n {
                if active[b] && dis[a * n + b] < best.0 {
                    best = (dis[a * n + b], a, b);
                }
            }
        }
        let (height, a, b) = best;
        let (na, nb) = (size[a] as f64, size[b] as f64);
        for c in 0..n {
            if !active[c] || c == a || c == b {
                continue;
            }
            let nc = size[c] as f64;
            let v = ((na + nc) * dis[c * n + a] + (nb + nc) * dis[c * n + b] - nc * height) / (na + nb + nc);
            dis[c * n + a] = v;
            dis[a * n + c] = v;
        }
        active[b] = false;
        size[a] += size[b];
        merges.push(Merge { a, b, height });
    }
    Dendrogram { n, merges }
}

pub fn ward_agglomerative(dataset: &Dataset, k: usize) -> Result<Partition> {
    let labels = ward_linkage(dataset).cut(k)?;
    Partition::from_data_labels(dataset, &labels)
}
