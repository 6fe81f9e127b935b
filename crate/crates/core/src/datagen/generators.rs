use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng::seeded;
use crate::certify::construct_boundary_dataset;
use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};

/// Ground-truth label given to background noise points.
pub const NOISE_LABEL: i64 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Two interleaved unit half-circles, the second shifted by `(1, −0.5)`,
    /// plus isotropic Gaussian noise of standard deviation `noise`.
    TwoMoons { noise: f64 },
    /// I.i.d. uniform on the unit square.
    Uniform,
    /// Equal-weight isotropic Gaussian components.
    GaussianBlobs { centers: Vec<Vec<f64>>, std: f64 },
    /// Blobs plus `round(n · noise_fraction)` uniform points drawn from the
    /// axis-aligned box `[low, high]`.
    BlobsWithNoise {
        centers: Vec<Vec<f64>>,
        std: f64,
        noise_fraction: f64,
        low: Vec<f64>,
        high: Vec<f64>,
    },
    /// `x_i = i` for `i = 1..=n`, one-dimensional.
    Collinear,
    /// Single-cluster dataset with one point exactly on its bounding sphere.
    BoundaryWitness {
        lambda: f64,
        prototype: Vec<f64>,
        direction: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedData {
    pub dataset: Dataset,
    /// Ground-truth component per point; [`NOISE_LABEL`] for background noise.
    pub labels: Vec<i64>,
}

impl GeneratedData {
    pub fn noise_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l == NOISE_LABEL).collect()
    }

    pub fn labels_csv(&self) -> String {
        self.labels.iter().map(|l| format!("{l}\n")).collect()
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        match &self.kind {
            GeneratorKind::TwoMoons { noise } => nonneg("noise", *noise),
            GeneratorKind::Uniform | GeneratorKind::Collinear => Ok(()),
            GeneratorKind::GaussianBlobs { centers, std } => {
                nonneg("std", *std)?;
                check_centers(centers).map(|_| ())
            }
            GeneratorKind::BlobsWithNoise {
                centers,
                std,
                noise_fraction,
                low,
                high,
            } => {
                nonneg("std", *std)?;
                let d = check_centers(centers)?;
                if !(0.0..=1.0).contains(noise_fraction) {
                    return Err(invalid("noise_fraction", "must lie in [0, 1]"));
                }
                if low.len() != d || high.len() != d {
                    return Err(invalid("noise box", format!("bounds must have length {d}")));
                }
                if low.iter().zip(high).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
                    return Err(invalid("noise box", "need finite low <= high"));
                }
                Ok(())
            }
            GeneratorKind::BoundaryWitness { lambda, .. } => {
                if self.n < 2 {
                    return Err(invalid("n", "boundary witness needs at least 2 points"));
                }
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(invalid("lambda", "must be finite and > 0"));
                }
                Ok(())
            }
        }
    }
}

fn check_centers(centers: &[Vec<f64>]) -> Result<usize> {
    let d = centers.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(invalid("centers", "need at least one non-empty center"));
    }
    if centers.iter().any(|c| c.len() != d || c.iter().any(|v| !v.is_finite())) {
        return Err(invalid("centers", "all centers need the same dimension and finite values"));
    }
    Ok(d)
}

/// Build the dataset described by `spec`. Output depends only on the spec.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedData> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = seeded(spec.seed);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    match &spec.kind {
        GeneratorKind::TwoMoons { noise } => {
            let outer = n / 2;
            let inner = n - outer;
            for t in 0..outer {
                let angle = std::f64::consts::PI * t as f64 / (outer.max(2) - 1) as f64;
                rows.push(vec![angle.cos(), angle.sin()]);
                labels.push(0);
            }
            for t in 0..inner {
                let angle = std::f64::consts::PI * t as f64 / (inner.max(2) - 1) as f64;
                rows.push(vec![1.0 - angle.cos(), 0.5 - angle.sin()]);
                labels.push(1);
            }
            for row in &mut rows {
                for v in row.iter_mut() {
                    *v += noise * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        GeneratorKind::Uniform => {
            for _ in 0..n {
                rows.push(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
                labels.push(0);
            }
        }
        GeneratorKind::GaussianBlobs { centers, std } => {
            push_blobs(&mut rng, centers, *std, n, &mut rows, &mut labels);
        }
        GeneratorKind::BlobsWithNoise {
            centers,
            std,
            noise_fraction,
            low,
            high,
        } => {
            let noisy = (n as f64 * noise_fraction).round() as usize;
            push_blobs(&mut rng, centers, *std, n - noisy, &mut rows, &mut labels);
            for _ in 0..noisy {
                rows.push(low.iter().zip(high).map(|(l, h)| l + (h - l) * rng.gen::<f64>()).collect());
                labels.push(NOISE_LABEL);
            }
        }
        GeneratorKind::Collinear => {
            for i in 1..=n {
                rows.push(vec![i as f64]);
                labels.push(0);
            }
        }
        GeneratorKind::BoundaryWitness {
            lambda,
            prototype,
            direction,
        } => {
            let dataset = construct_boundary_dataset(n, *lambda, prototype, direction)?;
            return Ok(GeneratedData {
                dataset,
                labels: vec![0; n],
            });
        }
    }
    Ok(GeneratedData {
        dataset: Dataset::from_rows(&rows)?,
        labels,
    })
}

/// Component sizes differ by at most one; the first `n mod k` get the extra.
fn push_blobs(
    rng: &mut impl Rng,
    centers: &[Vec<f64>],
    std: f64,
    n: usize,
    rows: &mut Vec<Vec<f64>>,
    labels: &mut Vec<i64>,
) {
    let k = centers.len();
    for (c, center) in centers.iter().enumerate() {
        let count = n / k + usize::from(c < n % k);
        for _ in 0..count {
            rows.push(
                center
                    .iter()
                    .map(|m| m + std * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            );
            labels.push(c as i64);
        }
    }
}

/// Closed ball used as a sampling region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Append `count` points drawn uniformly from `region` by rejection from its
/// bounding cube. The original rows are unchanged.
pub fn add_interior_samples(dataset: &Dataset, region: &Ball, count: usize, seed: u64) -> Result<Dataset> {
    let d = dataset.d();
    if region.center.len() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("ball center of length {d}"),
            found: format!("length {}", region.center.len()),
        });
    }
    if !(region.radius.is_finite() && region.radius > 0.0) || region.center.iter().any(|v| !v.is_finite()) {
        return Err(invalid("ball", "needs a finite center and finite radius > 0"));
    }
    if count == 0 {
        return Ok(dataset.clone());
    }
    let mut rng = seeded(seed);
    let mut flat = Vec::with_capacity(count * d);
    let mut accepted = 0;
    let mut offset = vec![0.0; d];
    while accepted < count {
        for o in offset.iter_mut() {
            *o = rng.gen_range(-1.0..=1.0);
        }
        if offset.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            flat.extend(region.center.iter().zip(&offset).map(|(c, o)| c + region.radius * o));
            accepted += 1;
        }
    }
    let extra = Dataset::new(Array2::from_shape_vec((count, d), flat).expect("count × d"))?;
    dataset.appended(&extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::dist;

    fn spec(kind: GeneratorKind, n: usize) -> GeneratorSpec {
        GeneratorSpec { kind, n, seed: 11 }
    }

    #[test]
    fn two_moons_halves() {
        let g = generate(&spec(GeneratorKind::TwoMoons { noise: 0.15 }, 100)).unwrap();
        assert_eq!(g.dataset.n(), 100);
        assert_eq!(g.labels.iter().filter(|&&l| l == 0).count(), 50);
        assert_eq!(g.labels.iter().filter(|&&l| l == 1).count(), 50);
    }

    #[test]
    fn noiseless_moons_lie_on_circles() {
        let g = generate(&spec(GeneratorKind::TwoMoons { noise: 0.0 }, 20)).unwrap();
        for i in 0..10 {
            assert!((dist(g.dataset.row(i), &[0.0, 0.0]) - 1.0).abs() < 1e-12);
            assert!((dist(g.dataset.row(10 + i), &[1.0, 0.5]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_in_unit_square() {
        let g = generate(&spec(GeneratorKind::Uniform, 50)).unwrap();
        assert_eq!(g.dataset.n(), 50);
        assert!(g.dataset.points().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn noise_fraction_count() {
        let g = generate(&spec(
            GeneratorKind::BlobsWithNoise {
                centers: vec![vec![0.0, 0.0], vec![5.0, 0.0], vec![10.0, 0.0]],
                std: 1.0,
                noise_fraction: 0.1,
                low: vec![-5.0, -5.0],
                high: vec![15.0, 5.0],
            },
            200,
        ))
        .unwrap();
        assert_eq!(g.dataset.n(), 200);
        assert_eq!(g.noise_mask().iter().filter(|&&b| b).count(), 20);
    }

    #[test]
    fn collinear_rows() {
        let g = generate(&spec(GeneratorKind::Collinear, 5)).unwrap();
        let values: Vec<f64> = g.dataset.points().iter().copied().collect();
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn same_seed_same_bits() {
        let s = spec(
            GeneratorKind::GaussianBlobs {
                centers: vec![vec![0.0, 0.0], vec![3.0, 1.0]],
                std: 0.5,
            },
            31,
        );
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = GeneratorSpec { seed: 12, ..s.clone() };
        assert_ne!(generate(&s).unwrap().dataset, generate(&other).unwrap().dataset);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&spec(GeneratorKind::TwoMoons { noise: -0.1 }, 10)).is_err());
        assert!(generate(&spec(GeneratorKind::Uniform, 0)).is_err());
        assert!(generate(&spec(
            GeneratorKind::GaussianBlobs {
                centers: vec![vec![0.0], vec![1.0, 2.0]],
                std: 1.0
            },
            10
        ))
        .is_err());
    }

    #[test]
    fn interior_samples() {
        let base = Dataset::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let ball = Ball {
            center: vec![5.0, -1.0],
            radius: 0.3,
        };
        assert_eq!(add_interior_samples(&base, &ball, 0, 1).unwrap(), base);
        let grown = add_interior_samples(&base, &ball, 24, 1).unwrap();
        assert_eq!(grown.n(), 26);
        assert_eq!(grown.row(0), base.row(0));
        assert_eq!(grown.row(1), base.row(1));
        for i in 2..26 {
            assert!(dist(grown.row(i), &ball.center) <= ball.radius);
        }
        let bad = Ball {
            center: vec![0.0],
            radius: 1.0,
        };
        assert!(add_interior_samples(&base, &bad, 3, 1).is_err());
    }
}
