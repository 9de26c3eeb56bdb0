#![no_main]

use libfuzzer_sys::fuzz_target;
use ptnlse_cli::{parse_config, RunConfig};

fuzz_target!(|data: &str| {
    if let Ok(pairs) = parse_config(data) {
        // every parsed key is non-empty and trimmed
        for (k, v) in &pairs {
            assert!(!k.is_empty());
            assert_eq!(k.trim(), k);
            assert_eq!(v.trim(), v);
        }
        let _ = RunConfig::default().apply_all(&pairs);
    }
});
