#![no_main]
use libfuzzer_sys::fuzz_target;
use timeop::experiment::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(s) {
            assert!(cfg.tolerances.values().all(|t| *t > 0.0));
        }
    }
});
