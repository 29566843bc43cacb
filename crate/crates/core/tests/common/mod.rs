#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use covarkit::problem::{Problem, ProblemFile};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Problem {
    ProblemFile::load(&fixture_path(name))
        .and_then(|f| f.build())
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A fixture as raw JSON, for tests that perturb one field.
pub fn fixture_json(name: &str) -> serde_json::Value {
    let src = std::fs::read_to_string(fixture_path(name)).unwrap();
    serde_json::from_str(&src).unwrap()
}

pub fn problem_from_json(v: &serde_json::Value) -> covarkit::Result<Problem> {
    ProblemFile::from_json(&v.to_string())?.build()
}

/// Relative closeness with an absolute floor of `tol`.
pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}
