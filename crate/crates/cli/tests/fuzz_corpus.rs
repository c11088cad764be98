//! Replays the checked-in fuzz seeds through the same parse and round-trip
//! checks as the fuzz targets, so regressions surface on stable toolchains.

use std::path::{Path, PathBuf};

use flexinfo_cli::config::parse_prior;
use flexinfo_core::io::{
    cost_from_json, cost_to_json, distribution_from_json, distribution_to_json, parse_document, parse_problem,
    problem_to_json, screening_instance_from_json, to_canonical,
};
use flexinfo_core::scalar::{format_rational, parse_rational};
use flexinfo_core::Rational;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn problem_seeds_round_trip() {
    for (_, text) in seeds("problem") {
        if let Ok(d) = parse_problem::<Rational>(&text) {
            let again = parse_problem::<Rational>(&to_canonical(&problem_to_json(&d))).unwrap();
            assert_eq!(again.actions(), d.actions());
            let _ = d.subdivision();
        }
        let _ = parse_problem::<f64>(&text);
    }
}

#[test]
fn scalar_seeds_round_trip() {
    for (_, text) in seeds("scalar") {
        if let Ok(r) = parse_rational(&text) {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}

#[test]
fn cost_seeds_round_trip() {
    for (p, text) in seeds("cost") {
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        if let Ok(c) = cost_from_json::<Rational>(&doc) {
            assert_eq!(cost_from_json::<Rational>(&cost_to_json(&c)).unwrap(), c);
        }
        let _ = cost_from_json::<f64>(&doc);
    }
}

#[test]
fn distribution_seeds_round_trip() {
    for (p, text) in seeds("distribution") {
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        if let Ok(phi) = distribution_from_json::<Rational>(&doc) {
            assert_eq!(distribution_from_json::<Rational>(&distribution_to_json(&phi)).unwrap(), phi);
        }
        let _ = distribution_from_json::<f64>(&doc);
    }
}

#[test]
fn screening_seeds_parse() {
    for (p, text) in seeds("screening") {
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        screening_instance_from_json::<f64>(&doc).unwrap().validate().unwrap();
    }
}

#[test]
fn prior_seeds_parse_or_fail_cleanly() {
    for (_, text) in seeds("prior") {
        let _ = parse_prior::<Rational>(&text);
        let _ = parse_prior::<f64>(&text);
    }
}
