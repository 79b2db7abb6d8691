use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fermifold"));
    c.env_remove("FERMIFOLD_LOG");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn annihilating_the_single_particle_gives_one() {
    let out = run(&["run", fixture("fock_element.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let task = &report["tasks"][0];
    assert_eq!(task["id"], "vac-b-one");
    assert_eq!(task["status"], "ok");
    assert_eq!(task["value"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn empty_task_list_is_an_empty_report() {
    let out = run(&["run", fixture("empty.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["tasks"], serde_json::json!([]));
}

#[test]
fn oversized_oracle_check_is_a_capacity_error() {
    let out = run(&["run", fixture("capacity.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    let tasks = report["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 2);
    assert_eq!(tasks[0]["status"], "ok");
    assert_eq!(tasks[1]["id"], "too-big");
    assert_eq!(tasks[1]["status"], "error");
    assert!(tasks[1]["error"].as_str().unwrap().contains("capacity"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("task too-big") && stderr.contains("ceiling is 16"),
        "{stderr}"
    );
}

#[test]
fn raised_ceiling_admits_the_large_config() {
    let dir = std::env::temp_dir().join(format!("fermifold-ceiling-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scenario.json");
    std::fs::write(
        &path,
        r#"{"settings":{"oracle_ceiling":18},"tasks":[{"id":"big","kind":"oracle-check","config":[5,5,4,4],"expr":"b-[11,1] b+[11,1]"}]}"#,
    )
    .unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn io_and_schema_failures_exit_one() {
    let out = run(&["run", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let dir = std::env::temp_dir().join(format!("fermifold-schema-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"tasks":[{"id":"x","kind":"no-such-kind"}]}"#).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("schema error") && stderr.contains("task x"),
        "{stderr}"
    );
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn tour_scenario_values() {
    let out = run(&["run", scenario("tour.json").to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out);
    let by_id = |id: &str| {
        report["tasks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["id"] == id)
            .unwrap()
            .clone()
    };
    assert_eq!(by_id("sign-string")["value"], serde_json::json!([1.0, 0.0]));
    assert_eq!(
        by_id("sign-string")["diagnostics"]["ordered_product_phase"],
        -1
    );
    let sup = by_id("superposition")["value"][0].as_f64().unwrap();
    assert!((sup + 0.2).abs() < 1e-15);
    assert_eq!(by_id("pair-vev")["value"], serde_json::json!([1.0, 0.0]));
    assert_eq!(by_id("rotated-area")["value"][0]["value"], 2.0);
    let area = by_id("unit-square")["value"].as_f64().unwrap();
    assert!((area - 1.0).abs() < 1e-10);
    // L_A(y dx) = x dx − y dy for the rotation field A = −y ∂x + x ∂y, evaluated at (0.5, −0.25).
    let lie = &by_id("lie-flow")["value"];
    assert!((lie[0]["value"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert!((lie[1]["value"].as_f64().unwrap() - 0.25).abs() < 1e-4);
}

#[test]
fn reports_are_independent_of_parallelism_and_output_target() {
    let path = scenario("tour.json");
    let serial = run(&["run", path.to_str().unwrap(), "--jobs", "1"]);
    let parallel = run(&["run", path.to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(serial.stdout, parallel.stdout);

    let dir = std::env::temp_dir().join(format!("fermifold-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("report.json");
    let written = run(&[
        "run",
        path.to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), serial.stdout);
    std::fs::remove_dir_all(&dir).unwrap();

    let reseeded = run(&["run", path.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(json(&reseeded)["seed"], 99);
}

#[test]
fn selftest_is_byte_identical_across_runs() {
    let a = run(&["selftest", "--seed", "7"]);
    let b = run(&["selftest", "--seed", "7"]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stdout)
    );
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("18 of 18 properties passed"));
}

#[test]
fn quick_selftest_json() {
    let out = run(&["selftest", "--quick", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["quick"], true);
    assert_eq!(report["max_modes"], 6);
}

#[test]
fn expr_prints_canonical_form_and_vev() {
    let out = run(&["expr", "b-[11,1] b+[11,1]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("canonical: 1 - b+[11,1] b-[11,1]"), "{text}");
    assert!(text.contains("vev:       [1, 0]"), "{text}");

    let bad = run(&["expr", "b-[13,1]"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("column 4"));
}

#[test]
fn grammar_is_printed() {
    let out = run(&["grammar"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        fermifold::opalg::GRAMMAR
    );
}
