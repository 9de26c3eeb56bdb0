#![no_main]

use libfuzzer_sys::fuzz_target;
use ptnlse_core::Family;

fuzz_target!(|data: &str| {
    match data.parse::<Family>() {
        Ok(f) => assert_eq!(f.name(), data),
        Err(e) => assert!(e.to_string().contains("unknown family")),
    }
    let _ = ptnlse_cli::parse_family(data);
});
