#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust_cli::RunManifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = RunManifest::from_json(text) {
        assert_eq!(RunManifest::from_json(&m.to_json()).expect("round trip"), m);
    }
});
