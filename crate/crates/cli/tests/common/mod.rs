#![allow(dead_code)]

use orbitlab_cli::input::parse_system;
use orbitlab_core::holonomic::PRecurrence;

/// Named recurrence documents: `a_{n+1} = Σ r_i(n)·a_{n−i}`.
pub const CORPUS: [(&str, &str); 10] = [
    ("fibonacci", r#"{"recurrence": {"order": 1, "coeffs": ["1", "1"], "init": ["0", "1"]}}"#),
    ("powers_of_two", r#"{"recurrence": {"order": 0, "coeffs": ["2"], "init": ["1"]}}"#),
    ("exponential", r#"{"recurrence": {"order": 0, "coeffs": ["1/(n+1)"], "init": ["1"]}}"#),
    ("catalan", r#"{"recurrence": {"order": 0, "coeffs": ["(4*n+2)/(n+2)"], "init": ["1"]}}"#),
    (
        "interleaved_geometric",
        r#"{"recurrence": {"order": 3, "coeffs": ["0", "13", "0", "-36"], "init": ["3", "5", "12", "45"]}}"#,
    ),
    ("central_binomial", r#"{"recurrence": {"order": 0, "coeffs": ["(4*n+2)/(n+1)"], "init": ["1"]}}"#),
    (
        "motzkin",
        r#"{"recurrence": {"order": 1, "coeffs": ["(2*n+3)/(n+3)", "3*n/(n+3)"], "init": ["1", "1"]}}"#,
    ),
    ("tribonacci", r#"{"recurrence": {"order": 2, "coeffs": ["1", "1", "1"], "init": ["0", "0", "1"]}}"#),
    ("pell", r#"{"recurrence": {"order": 1, "coeffs": ["2", "1"], "init": ["0", "1"]}}"#),
    ("shifted_pole", r#"{"recurrence": {"order": 0, "coeffs": ["n/(n-2)"], "shift": 3, "init": ["1"]}}"#),
];

pub fn corpus_recurrence(doc: &str) -> PRecurrence {
    parse_system(doc).expect("corpus document parses").recurrence.expect("corpus document has a recurrence")
}

pub fn corpus() -> Vec<(&'static str, PRecurrence)> {
    CORPUS.iter().map(|(name, doc)| (*name, corpus_recurrence(doc))).collect()
}

pub const INTRO_SYSTEM: &str = r#"{"generators": ["2"], "map": ["x1+1"], "start": ["1"], "observable": "x1"}"#;

pub const TORUS_SYSTEM: &str =
    r#"{"generators": ["2", "3"], "map": ["2*x1", "3*x1*x2"], "start": ["1", "1"], "observable": "x1*x2"}"#;

pub const INTERLEAVED_CERTIFY: &str = r#"{
  "generators": ["2", "3", "5"],
  "recurrence": {"order": 3, "coeffs": ["0", "13", "0", "-36"], "init": ["3", "5", "12", "45"]}
}"#;

pub const SQUARING_SYSTEM: &str = r#"{"map": ["x1^2"], "start": ["2"], "observable": "x1"}"#;
