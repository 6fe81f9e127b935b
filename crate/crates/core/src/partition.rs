//! Cluster structure read off a prototype matrix.

use std::collections::HashMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::{dist, Dataset};
use crate::error::{Error, Result};

/// Assignment of the `n` points to `k` clusters with one centroid per cluster.
///
/// Labels are numbered in order of first appearance, so point 0 is always in
/// cluster 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    labels: Vec<usize>,
    centroids: Array2<f64>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Connected components of the graph joining prototypes within
    /// `fuse_tol` of each other. Chains are merged transitively even when
    /// their endpoints are further apart than `fuse_tol`.
    pub fn extract(prototypes: &Array2<f64>, fuse_tol: f64) -> Self {
        let u = prototypes.as_standard_layout();
        let (n, d) = u.dim();
        let flat = u.as_slice().expect("standard layout");
        let row = |i: usize| &flat[i * d..(i + 1) * d];
        let mut sets = DisjointSets::new(n);
        for i in 0..n {
            for j in 0..i {
                if dist(row(i), row(j)) <= fuse_tol {
                    sets.union(i, j);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| sets.find(i)).collect();
        let labels = relabel(&roots);
        let centroids = group_means(&labels, flat, d);
        Self::from_parts(labels, centroids)
    }

    /// Partition from explicit labels, with each centroid the mean of the
    /// given rows (data points or prototypes) in that cluster.
    pub fn from_labels(labels: &[usize], rows: &Array2<f64>) -> Result<Self> {
        if labels.len() != rows.nrows() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} labels", rows.nrows()),
                found: format!("{}", labels.len()),
            });
        }
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        let rows = rows.as_standard_layout();
        let labels = relabel(labels);
        let centroids = group_means(&labels, rows.as_slice().expect("standard layout"), rows.ncols());
        Ok(Self::from_parts(labels, centroids))
    }

    /// Partition whose centroids are the cluster means of the data.
    pub fn from_data_labels(dataset: &Dataset, labels: &[usize]) -> Result<Self> {
        Self::from_labels(labels, dataset.points())
    }

    /// Partition with caller-supplied centroids. Labels must use every index
    /// in `0..centroids.nrows()`; they are not renumbered.
    pub fn with_centroids(labels: Vec<usize>, centroids: Array2<f64>) -> Result<Self> {
        let k = centroids.nrows();
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        let mut sizes = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidParameter {
                    name: "labels",
                    reason: format!("label {l} of point {i} out of range for k = {k}"),
                });
            }
            sizes[l] += 1;
        }
        if let Some(l) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidParameter {
                name: "labels",
                reason: format!("cluster {l} has no members"),
            });
        }
        if let Some(((row, col), _)) = centroids.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self {
            labels,
            centroids: centroids.as_standard_layout().into_owned(),
            sizes,
        })
    }

    fn from_parts(labels: Vec<usize>, centroids: Array2<f64>) -> Self {
        let mut sizes = vec![0usize; centroids.nrows()];
        for &l in &labels {
            sizes[l] += 1;
        }
        Self {
            labels,
            centroids,
            sizes,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn centroids(&self) -> &Array2<f64> {
        &self.centroids
    }

    pub fn centroid(&self, l: usize) -> &[f64] {
        let d = self.centroids.ncols();
        &self.centroids.as_slice().expect("standard layout")[l * d..(l + 1) * d]
    }

    /// Indices of the points in cluster `l`, ascending.
    pub fn members(&self, l: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == l).collect()
    }

    /// Member lists for every cluster.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn largest_cluster_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// `n × d` matrix with each point's centroid in its row.
    pub fn assigned_centroids(&self) -> Array2<f64> {
        let d = self.centroids.ncols();
        let mut out = Array2::zeros((self.n(), d));
        for (i, &l) in self.labels.iter().enumerate() {
            out.row_mut(i).assign(&self.centroids.row(l));
        }
        out
    }

    /// Same grouping, ignoring label numbering and centroids.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.n() == other.n() && relabel(&self.labels) == relabel(&other.labels)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PartitionJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: PartitionJson = serde_json::from_str(text)?;
        let k = wire.k;
        if wire.centroids.len() != k {
            return Err(Error::DimensionMismatch {
                expected: format!("{k} centroids"),
                found: format!("{}", wire.centroids.len()),
            });
        }
        let d = wire.centroids.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::Empty);
        }
        if let Some(bad) = wire.centroids.iter().find(|c| c.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: format!("centroids of length {d}"),
                found: format!("length {}", bad.len()),
            });
        }
        let flat: Vec<f64> = wire.centroids.into_iter().flatten().collect();
        let centroids = Array2::from_shape_vec((k, d), flat).expect("lengths checked");
        Self::with_centroids(wire.labels, centroids)
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    k: usize,
}

impl From<&Partition> for PartitionJson {
    fn from(p: &Partition) -> Self {
        Self {
            labels: p.labels.clone(),
            centroids: p.centroids.rows().into_iter().map(|r| r.to_vec()).collect(),
            k: p.k(),
        }
    }
}

/// Renumber arbitrary group keys `0, 1, ...` in order of first appearance.
fn relabel(keys: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    keys.iter()
        .map(|key| {
            let next = map.len();
            *map.entry(*key).or_insert(next)
        })
        .collect()
}

fn group_means(labels: &[usize], flat: &[f64], d: usize) -> Array2<f64> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sums = Array2::<f64>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(&flat[i * d..(i + 1) * d]) {
            *s += v;
        }
    }
    for (mut row, &c) in sums.rows_mut().into_iter().zip(&counts) {
        row.mapv_inplace(|v| v / c as f64);
    }
    sums
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
