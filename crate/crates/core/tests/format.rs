//! Fixture-corpus tests for the document format: canonical round trips,
//! builder coverage, and one rejection fixture per diagnostic code.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use ainfty::specfmt::{build, parse, serialize, to_json, DiagnosticCode};

fn fixtures() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut out = Vec::new();
    for entry in fs::read_dir(&dir).expect("fixtures directory") {
        let path = entry.expect("dir entry").path();
        if path.extension().map(|e| e == "afd").unwrap_or(false) {
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            out.push((name, fs::read_to_string(&path).expect("readable fixture")));
        }
    }
    out.sort();
    assert!(!out.is_empty(), "fixture corpus must not be empty");
    out
}

#[test]
fn valid_fixtures_are_canonical_and_round_trip_byte_identically() {
    for (name, text) in fixtures() {
        if name.starts_with("rej_") {
            continue;
        }
        let doc = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let rendered = serialize(&doc);
        assert_eq!(rendered, text, "fixture `{name}` is not in canonical form");
        // Idempotence on a second pass.
        let reparsed = parse(&rendered).unwrap();
        assert_eq!(serialize(&reparsed), rendered, "canonicalization not idempotent on `{name}`");
        // The machine rendering exists and is deterministic.
        assert_eq!(to_json(&doc), to_json(&reparsed));
    }
}

#[test]
fn valid_fixtures_build_into_typed_structures() {
    for (name, text) in fixtures() {
        if name.starts_with("rej_") {
            continue;
        }
        let doc = parse(&text).unwrap();
        let reg = build(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(reg.bases.len(), doc.bases.len(), "{name}");
        assert_eq!(reg.gluings.len(), doc.gluings.len(), "{name}");
    }
}

#[test]
fn every_documented_diagnostic_code_has_a_rejection_fixture() {
    let mut covered: BTreeSet<DiagnosticCode> = BTreeSet::new();
    for (name, text) in fixtures() {
        let Some(code_name) = name.strip_prefix("rej_") else {
            continue;
        };
        let err = parse(&text)
            .err()
            .unwrap_or_else(|| panic!("rejection fixture `{name}` parsed successfully"));
        assert_eq!(
            err.code.as_str(),
            code_name.to_uppercase(),
            "fixture `{name}` triggered {} instead ({})",
            err.code,
            err.message
        );
        assert!(err.line >= 1 && err.col >= 1, "{name}: diagnostic has a position");
        covered.insert(err.code);
    }
    for code in DiagnosticCode::ALL {
        assert!(
            covered.contains(&code),
            "diagnostic code {code} has no rejection fixture"
        );
    }
}

#[test]
fn parser_never_panics_on_mangled_fixtures() {
    // Cheap robustness sweep: truncations and single-line deletions of every
    // fixture must produce a value, never a panic.
    for (_, text) in fixtures() {
        for cut in [0, text.len() / 3, text.len() / 2, text.len().saturating_sub(4)] {
            let prefix: String = text.chars().take(cut).collect();
            let _ = parse(&prefix);
        }
        let lines: Vec<&str> = text.lines().collect();
        for skip in 0..lines.len() {
            let mangled: String = lines
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, l)| format!("{l}\n"))
                .collect();
            let _ = parse(&mangled);
        }
    }
}
