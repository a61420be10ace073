use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bkalg"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn strip_timing(mut v: Value) -> Value {
    for c in v["commands"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("elapsed_ms");
    }
    v
}

#[test]
fn scalar_gelfand_mazur_is_isomorphic() {
    let out = run(&[
        "gelfand-mazur",
        scenario("scalar.json").to_str().unwrap(),
        "--samples",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["passed"], true);
    assert_eq!(report["commands"][0]["result"]["outcome"], "isomorphic");
}

#[test]
fn matrix_reverse_bound_is_a_counterexample() {
    let out = run(&["reverse-bound", scenario("matrix2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["commands"][0]["result"]["outcome"], "counterexample");
    assert_eq!(
        report["commands"][0]["result"]["witness"]["type"],
        "zero-divisors"
    );
}

#[test]
fn malformed_literal_is_a_parse_error() {
    let text = std::fs::read_to_string(scenario("matrix2.json")).unwrap();
    let bad = text.replacen(
        r#""w2": [[1, 0], [0, 0.2], [0, -0.2], [1, 0]]"#,
        r#""w2": [[1, 0], [0, 0.2], [0, -0.2]]"#,
        1,
    );
    assert_ne!(bad, text);
    let path = tmp("malformed.json");
    std::fs::write(&path, bad).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("section `x`") && err.contains("atom `w2`"),
        "{err}"
    );
}

#[test]
fn unknown_command_and_bad_flags_exit_2() {
    let text = std::fs::read_to_string(scenario("scalar.json")).unwrap();
    let path = tmp("unknown-command.json");
    std::fs::write(&path, text.replacen(r#""norms""#, r#""diagonalize""#, 1)).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diagonalize"));

    let out = run(&[
        "run",
        scenario("scalar.json").to_str().unwrap(),
        "--report",
        "yaml",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["run", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failure_exits_1_with_a_report() {
    let text = std::fs::read_to_string(scenario("scalar.json")).unwrap();
    let path = tmp("singular.json");
    std::fs::write(
        &path,
        text.replacen(r#""w2": [0, 2]"#, r#""w2": [0, 0]"#, 1),
    )
    .unwrap();
    let out = run(&["invert", path.to_str().unwrap(), "x"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["commands"][0]["status"], "precondition-failed");
    assert!(report["commands"][0]["summary"]
        .as_str()
        .unwrap()
        .contains("w2"));
}

#[test]
fn seeded_runs_are_identical_and_seeds_matter() {
    let path = scenario("mixed.json");
    let args = [
        "run",
        path.to_str().unwrap(),
        "--seed",
        "0",
        "--samples",
        "40",
    ];
    let a = strip_timing(json(&run(&args)));
    let b = strip_timing(json(&run(&args)));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = strip_timing(json(&run(&[
        "run",
        path.to_str().unwrap(),
        "--seed",
        "1",
        "--samples",
        "40",
    ])));
    assert_ne!(a, c);
    assert_eq!(c["seed"], 1);
}

#[test]
fn replaying_a_report_reproduces_its_witnesses() {
    let report = tmp("matrix-report.json");
    let out = run(&[
        "run",
        scenario("matrix2.json").to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = run(&["replay", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reproduced"], true);
    assert!(v["witnesses"].as_array().unwrap().len() >= 2);

    // a tampered witness no longer reproduces
    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let cmds = r["commands"].as_array_mut().unwrap();
    let gm = cmds
        .iter_mut()
        .find(|c| c["command"] == "gelfand-mazur")
        .unwrap();
    for atom in ["w1", "w2", "w3"] {
        gm["result"]["witness"]["section"][atom] =
            serde_json::json!([[1, 0], [0, 0], [0, 0], [1, 0]]);
    }
    let tampered = tmp("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&r).unwrap()).unwrap();
    let out = run(&["replay", tampered.to_str().unwrap(), "--report", "text"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn text_report_has_one_line_per_command() {
    let out = run(&[
        "run",
        scenario("scalar.json").to_str().unwrap(),
        "--report",
        "text",
        "--samples",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 1 + 6 + 1, "{text}");
    assert!(text.lines().last().unwrap().starts_with("pass (6/6"));
}
