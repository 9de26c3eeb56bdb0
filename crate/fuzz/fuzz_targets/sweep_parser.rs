#![no_main]

use libfuzzer_sys::fuzz_target;
use ptnlse_cli::parse_sweep;
use ptnlse_cli::sweep::{point, point_count, MAX_POINTS};

fuzz_target!(|data: &str| {
    if let Ok(axes) = parse_sweep(data) {
        let n = point_count(&axes);
        assert!(n >= 1 && n <= MAX_POINTS);
        // first and last points are addressable without walking the product
        let _ = point(&axes, 0);
        let _ = point(&axes, n - 1);
    }
});
