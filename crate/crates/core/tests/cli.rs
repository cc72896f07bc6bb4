//! End-to-end runs of the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ompc"))
}

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().unwrap()
}

fn read_json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sample_run_writes_a_feasible_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instances().join("sample_forest.json");
    let out = run(dir.path(), &["solve-steiner", "--instance", inst.to_str().unwrap(), "--w-opt", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(dir.path().join("report.json"));
    assert_eq!(report["feasible"], true);
    assert_eq!(report["report"]["w_opt"], 5.0);
    let csv = std::fs::read_to_string(dir.path().join("demands.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn adversary_summary_carries_the_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["eval-adversary", "--m", "16", "--d", "16", "--trials", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = read_json(dir.path().join("adversary_summary.json"));
    assert_eq!(summary["lower_bound"], 3.0);
    let csv = std::fs::read_to_string(dir.path().join("adversary_trials.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("trial,seed,max_violation"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn structural_self_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify-structural", "--trees", "300", "--max-n", "64", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(dir.path().join("structural_summary.json"))["passed"], true);
}

#[test]
fn generated_adversary_instance_round_trips_through_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["gen-adversary", "--m", "4", "--d", "2", "--seed", "3"]).status.success());
    let inst = dir.path().join("adversary_m4_d2_s3.json");
    let out = run(dir.path(), &["solve-ompc", "--instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(dir.path().join("summary.json"));
    assert!(summary["max_f"].as_f64().unwrap() <= summary["load_cap"].as_f64().unwrap());
    let out = run(dir.path(), &["baseline", "--instance", inst.to_str().unwrap(), "--kind", "ompc"]);
    assert!(out.status.success());
    assert_eq!(read_json(dir.path().join("baseline.json"))["objective"], 1.0);
}

#[test]
fn baseline_cache_returns_the_same_result() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let inst = instances().join("sample_forest.json");
    let args = [
        "baseline",
        "--instance",
        inst.to_str().unwrap(),
        "--kind",
        "ipgood",
        "--cache",
        cache.to_str().unwrap(),
    ];
    assert!(run(dir.path(), &args).status.success());
    let first = std::fs::read(dir.path().join("baseline.json")).unwrap();
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert!(run(dir.path(), &args).status.success());
    assert_eq!(std::fs::read(dir.path().join("baseline.json")).unwrap(), first);
}

#[test]
fn report_collects_summaries() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["round-trial", "--n", "64", "--trials", "5", "--seed", "2"]).status.success());
    assert!(run(dir.path(), &["report"]).status.success());
    let index = read_json(dir.path().join("report_index.json"));
    assert!(index["files"]["rounding_summary.json"].is_object());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("OMPC_OUT_DIR", dir.path())
        .args(["round-trial", "--n", "32", "--trials", "3", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("rounding_trials.csv").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(1));
    // Both or neither of the weight options is a usage error.
    assert_eq!(run(dir.path(), &["solve-steiner", "--instance", "x.json"]).status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn malformed_instance_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"vertices\": 3,\n  \"edges\": [[0, 1, \"x\"]]\n}\n").unwrap();
    let out = run(dir.path(), &["solve-steiner", "--instance", bad.to_str().unwrap(), "--w-opt", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    std::fs::write(&bad, r#"{"vertices": 2, "edges": [[0, 1, 1.0]], "bounds": [1, 1], "demands": [[0, 5]]}"#).unwrap();
    let out = run(dir.path(), &["solve-steiner", "--instance", bad.to_str().unwrap(), "--w-opt", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("demands"));
}

#[test]
fn infeasible_instances_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // The only covering variable would overload its packing row on its own.
    let inst = dir.path().join("tight.json");
    std::fs::write(
        &inst,
        r#"{"m": 1, "k": 1, "variables": [{"id": "a", "column": [[0, 2.0]]}], "covering": [{"coeffs": {"a": 1.0}}]}"#,
    )
    .unwrap();
    assert_eq!(run(dir.path(), &["solve-ompc", "--instance", inst.to_str().unwrap()]).status.code(), Some(2));

    // The middle vertex may carry only one edge, so the pair cannot be joined.
    let inst = dir.path().join("blocked.json");
    std::fs::write(&inst, r#"{"vertices": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0]], "bounds": [1, 1, 1], "demands": [[0, 2]]}"#)
        .unwrap();
    let args = ["solve-steiner", "--instance", inst.to_str().unwrap(), "--doubling", "--ratio", "2"];
    assert_eq!(run(dir.path(), &args).status.code(), Some(2));
}
