//! End-to-end behaviour of the `flexinfo` binary: outputs, exit codes and
//! error messages.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flexinfo")).args(args).arg("--out").arg(out).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_writes_value_curve_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", fixture("two_action.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("value.csv")).unwrap();
    assert!(csv.starts_with("x,value\n"));
    let svg = std::fs::read_to_string(dir.path().join("subdivision.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    let sub: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("subdivision.json")).unwrap()).unwrap();
    assert_eq!(sub["subdivision"]["cells"].as_array().map(Vec::len), Some(2));
}

#[test]
fn three_states_draw_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", fixture("motivating.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("subdivision.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
}

#[test]
fn single_action_problem_has_one_cell() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "one.json", r#"{"states": ["a", "b"], "actions": [{"label": "x", "payoffs": [1, 2]}]}"#);
    let o = run(&["analyze", &p], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("1 cells"));
}

#[test]
fn malformed_json_reports_position_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\"states\": [\"a\",\n  ");
    let o = run(&["analyze", &p], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn semantic_error_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", r#"{"states": ["a", "b"], "actions": [{"label": "x", "payoffs": [1, "q"]}]}"#);
    let o = run(&["analyze", &p], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.actions[0].payoffs[1]"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "/nonexistent/problem.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_prior_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["acquire", fixture("two_action.json").to_str().unwrap(), "--cost", fixture("persuasion_cost.json").to_str().unwrap(), "--prior", "1,0"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn entropy_cost_needs_float_mode() {
    let dir = tempfile::tempdir().unwrap();
    let problem = fixture("two_action.json");
    let cost = fixture("entropy_cost.json");
    let args = |mode: &'static str| vec!["acquire", problem.to_str().unwrap(), "--cost", cost.to_str().unwrap(), "--prior", "1/2,1/2", "--mode", mode];
    assert_eq!(run(&args("exact"), dir.path()).status.code(), Some(2));
    let o = run(&args("float"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let curve = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(curve.starts_with("x,value,cost,net\n"));
}

#[test]
fn inline_cost_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "acquire",
            fixture("two_action.json").to_str().unwrap(),
            "--cost",
            r#"{"family": "quadratic", "matrix": [[1, 0], [0, 1]]}"#,
            "--prior",
            "1/2,1/2",
            "--grid",
            "20",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn compare_reports_witness_for_pointwise_dominance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["compare", fixture("dominance_original.json").to_str().unwrap(), fixture("dominance_transformed.json").to_str().unwrap(), "--prior", "1/2,1/2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("convex difference: no"));
    assert!(summary.contains("witness:"));
    assert!(summary.contains("shift-majorizes yes"));
}

#[test]
fn compare_rejects_mismatched_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compare", fixture("two_action.json").to_str().unwrap(), fixture("motivating.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthesized_cost_round_trips_through_acquire() {
    let dir = tempfile::tempdir().unwrap();
    let problem = fixture("two_action.json");
    let o = run(&["synth-cost", problem.to_str().unwrap(), fixture("two_action_target.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cost.json")).unwrap()).unwrap();
    let cost = serde_json::to_string(&doc["cost"]).unwrap();
    let out = dir.path().join("acq");
    let o = run(&["acquire", problem.to_str().unwrap(), "--cost", &cost, "--prior", "1/2,1/2", "--grid", "400"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sol: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    let xs: Vec<&str> =
        sol["solution"]["distribution"]["support"].as_array().unwrap().iter().map(|e| e["belief"][1].as_str().unwrap()).collect();
    assert_eq!(xs, ["1/4", "3/4"]);
}

#[test]
fn redundant_target_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "t.json",
        r#"{"support": [{"belief": ["9/10", "1/10"], "weight": "1/2"}, {"belief": ["7/10", "3/10"], "weight": "1/2"}]}"#,
    );
    let o = run(&["synth-cost", fixture("two_action.json").to_str().unwrap(), &t], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn screening_writes_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["screen", fixture("screening.json").to_str().unwrap(), "--mode", "float"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("screening.json").exists());
}

#[test]
fn unknown_suite_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "nonsense"], dir.path()).status.code(), Some(2));
}

#[test]
fn failing_suite_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "persuasion-support"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL criterion 1"));
}

#[test]
fn reports_record_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "incomparable-pair", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-incomparable-pair.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["config"]["mode"], "exact");
}
