//! Frozen datasets for the figure reproductions.
//!
//! The blob geometry, seeds and `λ` values were calibrated numerically so
//! that the qualitative behaviour (merging, splitting, noise isolation,
//! sensitivity to `λ`) shows up at the `λ` magnitudes used in the figures.
//! They are approximations: the original constants were never published.

use super::generators::{add_interior_samples, generate, Ball, GeneratedData, GeneratorKind, GeneratorSpec};
use crate::dataset::Dataset;
use crate::error::Result;

/// Spacing between the three blob centers on the horizontal axis, in the
/// 200-point fixtures.
pub const BLOB_SPACING: f64 = 12.0;
pub const BLOB_STD: f64 = 0.5;
pub const THREE_BLOBS_N: usize = 200;
pub const THREE_BLOBS_SEED: u64 = 0;
pub const THREE_BLOBS_LAMBDA: f64 = 0.042;

pub const NOISE_FRACTION: f64 = 0.1;
pub const NOISY_BLOBS_SEED: u64 = 1;
pub const NOISY_BLOBS_LAMBDA: f64 = 0.042;
/// Noise points must end in clusters no larger than this.
pub const NOISE_CLUSTER_CAP: usize = 3;
/// Non-noise points count as clustered in clusters at least this large.
pub const SIGNAL_CLUSTER_MIN: usize = 10;
/// Fraction of non-noise points that must be clustered.
pub const SIGNAL_FRACTION_MIN: f64 = 0.8;

pub const MOONS_N: usize = 100;
pub const MOONS_NOISE: f64 = 0.15;
pub const MOONS_SEED: u64 = 4;
/// Adjacent `λ` values straddling the moons' fusion transition.
pub const MOONS_LAMBDAS: [f64; 3] = [0.017, 0.0172, 0.0175];
pub const MOONS_LAMBDA: f64 = 0.0172;

pub const UNIFORM_N: usize = 50;
pub const UNIFORM_SEED: u64 = 0;
pub const UNIFORM_LAMBDA: f64 = 0.01307;

/// Inflexibility experiment: three 20-point blobs, closer together.
pub const INFLEX_SPACING: f64 = 6.0;
pub const INFLEX_N: usize = 60;
pub const INFLEX_SEED: u64 = 0;
pub const INFLEX_INTERIOR_RADIUS: f64 = 0.5;
pub const INFLEX_INTERIOR_SEED: u64 = 100;
pub const INFLEX_ADDED: [usize; 4] = [0, 8, 16, 24];
/// Fixed `λ` for the growing-cluster row.
pub const INFLEX_LAMBDA: f64 = 0.11;
/// Decreasing `λ` row, applied to the largest dataset.
pub const INFLEX_LAMBDAS: [f64; 4] = [0.11, 0.099, 0.088, 0.077];
/// Ground-truth label of the blob that receives the extra points.
pub const INFLEX_GROWING_BLOB: i64 = 2;

fn line_centers(spacing: f64) -> Vec<Vec<f64>> {
    (0..3).map(|c| vec![c as f64 * spacing, 0.0]).collect()
}

pub fn three_blobs_spec() -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::GaussianBlobs {
            centers: line_centers(BLOB_SPACING),
            std: BLOB_STD,
        },
        n: THREE_BLOBS_N,
        seed: THREE_BLOBS_SEED,
    }
}

/// Background noise is uniform on a box one spacing wider than the blobs on
/// every side.
pub fn noisy_blobs_spec() -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::BlobsWithNoise {
            centers: line_centers(BLOB_SPACING),
            std: BLOB_STD,
            noise_fraction: NOISE_FRACTION,
            low: vec![-BLOB_SPACING, -BLOB_SPACING],
            high: vec![3.0 * BLOB_SPACING, BLOB_SPACING],
        },
        n: THREE_BLOBS_N,
        seed: NOISY_BLOBS_SEED,
    }
}

pub fn two_moons_spec() -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::TwoMoons { noise: MOONS_NOISE },
        n: MOONS_N,
        seed: MOONS_SEED,
    }
}

pub fn uniform_spec() -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::Uniform,
        n: UNIFORM_N,
        seed: UNIFORM_SEED,
    }
}

pub fn inflexibility_base_spec() -> GeneratorSpec {
    GeneratorSpec {
        kind: GeneratorKind::GaussianBlobs {
            centers: line_centers(INFLEX_SPACING),
            std: BLOB_STD,
        },
        n: INFLEX_N,
        seed: INFLEX_SEED,
    }
}

/// The region that receives the added points: a small ball at the center
/// of the rightmost blob.
pub fn inflexibility_region() -> Ball {
    Ball {
        center: vec![2.0 * INFLEX_SPACING, 0.0],
        radius: INFLEX_INTERIOR_RADIUS,
    }
}

/// One dataset per entry of [`INFLEX_ADDED`]. Each is the base sample with
/// points appended, so row indices of the base points are shared.
pub fn inflexibility_sequence() -> Result<(GeneratedData, Vec<Dataset>)> {
    let base = generate(&inflexibility_base_spec())?;
    let region = inflexibility_region();
    let datasets = INFLEX_ADDED
        .iter()
        .map(|&count| add_interior_samples(&base.dataset, &region, count, INFLEX_INTERIOR_SEED))
        .collect::<Result<_>>()?;
    Ok((base, datasets))
}

/// The four datasets of the comparison experiment with their `λ`.
pub fn comparison_suite() -> Result<Vec<(&'static str, GeneratedData, f64)>> {
    Ok(vec![
        ("two_moons", generate(&two_moons_spec())?, MOONS_LAMBDA),
        ("uniform", generate(&uniform_spec())?, UNIFORM_LAMBDA),
        ("three_blobs", generate(&three_blobs_spec())?, THREE_BLOBS_LAMBDA),
        ("blobs_with_noise", generate(&noisy_blobs_spec())?, NOISY_BLOBS_LAMBDA),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::NOISE_LABEL;

    #[test]
    fn fixture_sizes() {
        let noisy = generate(&noisy_blobs_spec()).unwrap();
        assert_eq!(noisy.dataset.n(), 200);
        assert_eq!(noisy.labels.iter().filter(|&&l| l == NOISE_LABEL).count(), 20);
        let (base, seq) = inflexibility_sequence().unwrap();
        let sizes: Vec<usize> = seq.iter().map(Dataset::n).collect();
        assert_eq!(sizes, vec![60, 68, 76, 84]);
        assert_eq!(base.labels.iter().filter(|&&l| l == INFLEX_GROWING_BLOB).count(), 20);
        assert_eq!(comparison_suite().unwrap().len(), 4);
    }
}
