#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust::hyperparam::GridSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(grid) = text.parse::<GridSpec>() else {
        return;
    };
    let again: GridSpec = grid.to_string().parse().expect("display output parses");
    assert_eq!(again, grid);
    if grid.count <= 10_000 {
        let values = grid.values();
        assert_eq!(values.len(), grid.count);
        assert!(values.iter().all(|v| *v >= 0.0));
    }
});
