#![no_main]
use libfuzzer_sys::fuzz_target;
use timeop::experiment::ConfigEntries;

// Each line is applied as a `--set` override on top of a valid base file.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let mut entries = ConfigEntries::parse("experiment=correspondence\n[grid]\nn=64\n").unwrap();
    for line in s.lines() {
        let _ = entries.set(line);
    }
    let _ = entries.build();
});
