//! Replays the checked-in fuzz seeds so the parsers see them on stable too.

use std::fs;
use std::path::PathBuf;

use timeop::experiment::{parse_config, ConfigEntries};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn parse_config_seeds() {
    let seeds = seeds("parse_config");
    assert!(seeds.len() >= 5);
    for (name, text) in &seeds {
        let result = parse_config(text);
        let expect_ok = !matches!(name.as_str(), "too_small" | "malformed");
        assert_eq!(result.is_ok(), expect_ok, "{name}: {result:?}");
    }
}

#[test]
fn config_override_seeds() {
    for (name, text) in seeds("config_override") {
        let mut entries = ConfigEntries::parse("experiment=correspondence\n[grid]\nn=64\n").unwrap();
        let applied = text.lines().map(|l| entries.set(l)).filter(Result::is_err).count();
        let built = entries.build();
        match name.as_str() {
            "junk" => assert_eq!(applied, 3),
            "grid_n" => assert_eq!(built.unwrap().grid.n, Some(256)),
            _ => assert_eq!(applied, 0, "{name}"),
        }
    }
}
