#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust::datagen::{generate, GeneratorKind, GeneratorSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<GeneratorSpec>(data) else {
        return;
    };
    let width = match &spec.kind {
        GeneratorKind::GaussianBlobs { centers, .. } | GeneratorKind::BlobsWithNoise { centers, .. } => {
            centers.iter().map(Vec::len).sum()
        }
        GeneratorKind::BoundaryWitness { prototype, .. } => prototype.len(),
        _ => 2,
    };
    if spec.n > 512 || width > 64 {
        return;
    }
    if let Ok(g) = generate(&spec) {
        assert_eq!(g.dataset.n(), spec.n);
        assert_eq!(g.labels.len(), spec.n);
        assert_eq!(generate(&spec).unwrap(), g);
    }
});
