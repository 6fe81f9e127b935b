#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust::Partition;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(p) = Partition::from_json(text) else {
        return;
    };
    assert_eq!(p.sizes().iter().sum::<usize>(), p.n());
    assert!(p.labels().iter().all(|&l| l < p.k()));
    assert_eq!(Partition::from_json(&p.to_json()).expect("round trip"), p);
});
