#![no_main]
use libfuzzer_sys::fuzz_target;

use cvxclust::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = Dataset::from_csv_reader(data) else {
        return;
    };
    assert!(ds.n() > 0 && ds.d() > 0);
    assert!(ds.points().iter().all(|v| v.is_finite()));
    let again = Dataset::from_csv_str(&ds.to_csv_string()).expect("written csv parses");
    assert_eq!(again, ds);
});
