#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust::{certify, CertifyOptions, Dataset, PrototypeSolution};

// Prototypes for a fixed 4-point planar dataset, as the certify command
// would read them.
fuzz_target!(|data: &[u8]| {
    let Ok(protos) = Dataset::from_csv_reader(data) else {
        return;
    };
    let ds = Dataset::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [3.0, 3.0]]).unwrap();
    let Ok(solution) = PrototypeSolution::from_prototypes(&ds, protos.points().clone(), 0.2) else {
        return;
    };
    let options = CertifyOptions {
        num_probes: 16,
        cert_iters: 200,
        ..CertifyOptions::for_dataset(&ds)
    };
    if let Ok(c) = certify(&ds, &solution, 1e-6, &options) {
        assert_eq!(c.report.checks.len(), 7);
    }
});
