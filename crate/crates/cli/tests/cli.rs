mod common;

use std::process::Command as Process;

use orbitlab_cli::input::{parse_system, serialize_problem, InputErrorKind};
use orbitlab_cli::run::{run_text, Command, Format, RunConfig, DEFAULT_BUDGET};
use orbitlab_core::exact_numbers::ratio;

use common::{CORPUS, INTERLEAVED_CERTIFY, INTRO_SYSTEM, SQUARING_SYSTEM, TORUS_SYSTEM};

fn config(command: Command, n: usize) -> RunConfig {
    RunConfig {
        command,
        input: None,
        n,
        l_max: 24,
        eps: ratio(1, 20),
        tail_fraction: ratio(1, 2),
        windows: Vec::new(),
        budget: DEFAULT_BUDGET,
        out: None,
        format: Format::Json,
    }
}

fn json(body: &str) -> serde_json::Value {
    serde_json::from_str(body).expect("report is JSON")
}

#[test]
fn corpus_round_trips() {
    let mut docs: Vec<&str> = CORPUS.iter().map(|(_, d)| *d).collect();
    docs.extend([INTRO_SYSTEM, TORUS_SYSTEM, INTERLEAVED_CERTIFY, SQUARING_SYSTEM]);
    docs.push(r#"{"ode": {"order": 1, "poly_coeffs": ["-1", "1 - x"], "init": ["1"]}, "values": ["inf", "1/2"]}"#);
    for doc in docs {
        let p = parse_system(doc).unwrap();
        let text = serialize_problem(&p);
        assert_eq!(parse_system(&text).unwrap(), p, "{doc}");
        assert_eq!(serialize_problem(&parse_system(&text).unwrap()), text);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_system(r#"{"map":["x1^1.5"],"start":["1"]}"#).unwrap_err();
    assert_eq!(e.kind, InputErrorKind::NonIntegerExponent);
    assert_eq!((e.line, e.column, e.token.as_str()), (1, 13, "1.5"));

    let e = parse_system("{\"recurrence\": {\"coeffs\": [\"m+1\"], \"init\": [\"1\"]}}").unwrap_err();
    assert_eq!((e.kind, e.field.as_str(), e.token.as_str()), (InputErrorKind::UnknownVariable, "recurrence.coeffs[0]", "m"));

    let e = parse_system("{\"ode\": {\"poly_coeffs\": [\"x +\"], \"init\": []}}").unwrap_err();
    assert_eq!(e.kind, InputErrorKind::SyntaxError);

    let e = parse_system("{\n  \"generators\": [2]\n}").unwrap_err();
    assert_eq!((e.kind, e.line), (InputErrorKind::Json, 2));
}

#[test]
fn report_envelope_and_exit_codes() {
    let out = run_text(&config(Command::Member, 63), INTRO_SYSTEM);
    assert_eq!(out.exit_code, 0);
    assert!(out.body.ends_with('\n'));
    let v = json(&out.body);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "member");
    assert_eq!(v["parameters"]["eps"], "1/20");
    assert_eq!(v["parameters"]["tail_fraction"], "1/2");
    assert_eq!(v["result"]["membership"]["members"], serde_json::json!([0, 1, 3, 7, 15, 31, 63]));

    let fib = format!("{{\"generators\": [\"2\"], {}", &CORPUS[0].1[1..]);
    let out = run_text(&config(Command::Certify, 199), &fib);
    assert_eq!(out.exit_code, 2);
    assert_eq!(json(&out.body)["result"]["certificate"]["stage"], "membership");

    let out = run_text(&config(Command::Certify, 20), INTERLEAVED_CERTIFY);
    assert_eq!(out.exit_code, 1);
    assert_eq!(json(&out.body)["error"]["kind"], "structure");

    let out = run_text(&config(Command::Certify, 199), INTERLEAVED_CERTIFY);
    assert_eq!(out.exit_code, 0);
    assert_eq!(json(&out.body)["result"]["closed_form"], "(-20*x^3 - 27*x^2 + 5*x + 3)/(36*x^4 - 13*x^2 + 1)");

    let out = run_text(&config(Command::Orbit, 50), SQUARING_SYSTEM);
    assert_eq!(out.exit_code, 1);
    assert_eq!(json(&out.body)["result"]["halt"]["status"], "budget_exceeded");
}

#[test]
fn errors_are_json() {
    let out = run_text(&config(Command::Member, 10), r#"{"map":["x1^x1"],"start":["1"]}"#);
    assert_eq!(out.exit_code, 1);
    let v = json(&out.body);
    assert_eq!(v["error"]["input"]["kind"], "non_integer_exponent");

    let out = run_text(&config(Command::Torus, 10), r#"{"values": ["1", "2"]}"#);
    assert_eq!(out.exit_code, 1);

    let mut cfg = config(Command::Orbit, 10);
    cfg.format = Format::Csv;
    assert_eq!(run_text(&cfg, SQUARING_SYSTEM).exit_code, 1);

    let mut cfg = config(Command::Orbit, 10);
    cfg.budget = 999;
    assert_eq!(run_text(&cfg, SQUARING_SYSTEM).exit_code, 1);
}

#[test]
fn torus_without_fit_exits_two() {
    let doc = r#"{"generators": ["2"], "values": ["1", "2", "8", "4", "64", "2"]}"#;
    let out = run_text(&config(Command::Torus, 10), doc);
    assert_eq!(out.exit_code, 2, "{}", out.body);
}

#[test]
fn csv_exports() {
    let mut cfg = config(Command::Member, 4);
    cfg.format = Format::Csv;
    let out = run_text(&cfg, INTRO_SYSTEM);
    assert_eq!(out.body, "n,member,zero\n0,1,0\n1,1,0\n2,0,0\n3,1,0\n4,0,0\n");

    let mut cfg = config(Command::Heights, 2);
    cfg.format = Format::Csv;
    let out = run_text(&cfg, r#"{"values": ["1", "-3/2", "4"]}"#);
    let lines: Vec<&str> = out.body.lines().collect();
    assert_eq!(lines[0], "n,height,log");
    assert_eq!(lines[1], "0,1,0");
    assert!(lines[2].starts_with("1,3,1.09"));
}

#[test]
fn sequence_source_priority() {
    let doc = r#"{"generators": ["2"], "values": ["4"], "map": ["x1+1"], "start": ["1"],
                  "recurrence": {"coeffs": ["3"], "init": ["1"]}}"#;
    let v = json(&run_text(&config(Command::Decompose, 3), doc).body);
    assert_eq!(v["result"]["sequence"]["source"], "values");
    let doc = r#"{"generators": ["2"], "map": ["x1+1"], "start": ["1"], "recurrence": {"coeffs": ["3"], "init": ["1"]}}"#;
    let v = json(&run_text(&config(Command::Decompose, 3), doc).body);
    assert_eq!(v["result"]["sequence"]["source"], "system");
    let doc = r#"{"generators": ["2"], "recurrence": {"coeffs": ["3"], "init": ["1"]}, "ode": {"poly_coeffs": ["-1", "1"], "init": ["1"]}}"#;
    let v = json(&run_text(&config(Command::Decompose, 3), doc).body);
    assert_eq!(v["result"]["sequence"]["source"], "recurrence");
}

#[test]
fn binary_reports_usage_errors_as_json() {
    let out = Process::new(env!("CARGO_BIN_EXE_orbitlab")).args(["member", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = json(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(v["error"]["kind"], "usage");

    let out = Process::new(env!("CARGO_BIN_EXE_orbitlab"))
        .args(["orbit", "--n", "3"])
        .env("ORBITLAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = json(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(v["error"]["kind"], "config");
}
