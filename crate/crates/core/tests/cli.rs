use std::process::{Command, Output};

use serde_json::Value;

use qudit_densecoding::cli::{self, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use qudit_densecoding::DeconstructionTrace;

fn qudense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudense")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn identities_pass_for_qubits_and_d7() {
    let o = qudense(&["--d", "2", "identities"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    assert_eq!(text.matches("PASS").count(), 4, "{text}");
    assert!(text.contains("x_equals_hzh"));

    let o = qudense(&["--d", "7", "--output", "json", "identities"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let checks = json(&o)["checks"].as_array().unwrap().clone();
    assert_eq!(checks.len(), 3);
    for c in checks {
        assert_eq!(c["pass"], true);
        assert!(c["max_deviation"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn bad_dimension_is_a_usage_error() {
    for d in ["1", "17", "two"] {
        let o = qudense(&["--d", d, "identities"]);
        assert_eq!(o.status.code(), Some(EXIT_USAGE), "d={d}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
    let o = qudense(&["--tolerance", "0", "identities"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
}

#[test]
fn deconstruct_qubit_prints_six_stages_and_five_passes() {
    let o = qudense(&["--d", "2", "deconstruct"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    for label in ['a', 'b', 'c', 'd', 'e', 'f'] {
        assert!(text.contains(&format!("stage {label}:")), "{text}");
    }
    assert_eq!(text.lines().filter(|l| l.ends_with("PASS")).count(), 5, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn deconstruct_qutrit_json_has_daggers_after_stage_a() {
    let o = qudense(&["--d", "3", "--output", "json", "deconstruct"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let trace = DeconstructionTrace::from_json(&stdout(&o)).unwrap();
    assert_eq!(trace.stages.len(), 6);
    assert!(trace.stages[0].gates().iter().all(|g| !g.dagger));
    for stage in &trace.stages[1..] {
        assert!(stage.gates().iter().any(|g| g.dagger), "{stage:?}");
    }
    assert!(trace.steps.iter().all(|s| s.report.pass));
}

#[test]
fn deconstruct_d5_succeeds() {
    assert_eq!(qudense(&["--d", "5", "deconstruct"]).status.code(), Some(EXIT_OK));
}

#[test]
fn emit_json_matches_stdout() {
    let path = std::env::temp_dir().join(format!("qudense-trace-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = qudense(&["--d", "4", "--output", "json", "deconstruct", "--emit-json", p]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, stdout(&o));
}

#[test]
fn protocol_examples() {
    let o = qudense(&["--d", "2", "--output", "json", "protocol", "--x", "1", "--y", "0"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v = json(&o);
    assert_eq!((v["decoded_x"].as_u64(), v["decoded_y"].as_u64()), (Some(1), Some(0)));
    assert!((v["probability"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(v["automated_match"], true);
    assert!(v.get("counts").is_none());

    let o = qudense(&["--d", "3", "protocol", "--x", "2", "--y", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains("decoded (x=2, y=2)"));

    let o = qudense(&["--d", "3", "protocol", "--x", "3", "--y", "0"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
}

#[test]
fn seeded_shots_are_deterministic() {
    let args = [
        "--d", "4", "--output", "json", "protocol", "--x", "3", "--y", "1", "--shots", "50", "--seed", "9",
    ];
    let first = qudense(&args);
    let second = qudense(&args);
    assert_eq!(first.stdout, second.stdout);
    let counts = json(&first)["counts"].clone();
    assert_eq!(counts["|31⟩"], 50, "{counts}");
}

#[test]
fn bell_listing() {
    let o = qudense(&["--d", "2", "bell"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    assert_eq!(text.matches("(x=").count(), 4);
    assert!(text.contains("(1/√2)"));

    let o = qudense(&["--d", "3", "bell"]);
    assert_eq!(stdout(&o).matches("(x=").count(), 9);

    let o = qudense(&["--d", "2", "--output", "json", "bell"]);
    let v = json(&o);
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 4);
    let amp = states[0]["amplitudes"][0][0].as_f64().unwrap();
    assert!((amp - 0.5f64.sqrt()).abs() < 1e-12);
    assert!(v["max_offdiag_gram"].as_f64().unwrap() < 1e-12);
}

#[test]
fn in_process_matches_binary() {
    let args = ["--d", "3", "--output", "json", "bell"];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("qudense").chain(args), &mut out, &mut err);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, qudense(&args).stdout);
}

#[test]
fn huge_tolerance_makes_the_drop_unconditional_and_fails() {
    // A huge tolerance makes the unconditional e/f comparison pass, which the
    // deconstruct command reports as a failure.
    let o = qudense(&["--d", "3", "--tolerance", "10", "deconstruct"]);
    assert_eq!(o.status.code(), Some(EXIT_FAILED));
}
