use std::fs;
use std::path::Path;

use lookdown::cli::{main_with_args, parse_config, run};

fn config(dir: &Path, body: &str) -> String {
    let out = dir.join("out");
    format!(r#"{{{body}, "out": {:?}}}"#, out.display().to_string())
}

fn run_doc(dir: &Path, body: &str) -> i32 {
    let c = parse_config(&config(dir, body)).unwrap();
    run(&c).unwrap().status
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn every_command_writes_its_outputs() {
    let cases = [
        (r#""command": "sample", "family": {"kind": "moran", "N": 4}, "cap": 6, "seed": 3"#, "descendants.csv"),
        (r#""command": "verify-neutrality", "X": [2, 3, 3], "litters": [[2, 1], [2, 1, 0]]"#, "neutrality.csv"),
        (r#""command": "sbo-check", "X": [4, 6], "litters": [[3, 1, 2, 0]]"#, "sbo.csv"),
        (r#""command": "coalescent", "family": "asynchronous", "x0": 2, "b": 2, "cap": 10"#, "scale.csv"),
        (r#""command": "identify-base", "family": {"kind": "moran", "N": 5}, "cap": 60, "reps": 200, "grid": [0, 3]"#, "identify_base.csv"),
        (r#""command": "rank-recovery", "family": {"kind": "moran", "N": 4}, "cap": 150, "reps": 100"#, "rank_recovery.csv"),
        (r#""command": "fixation", "family": {"kind": "moran", "N": 4}, "cap": 150, "reps": 100"#, "fixation.csv"),
        (r#""command": "gw-spine", "family": {"kind": "gw", "pmf": ["1/2", 0, "1/2"]}, "cap": 3, "reps": 50"#, "spine.csv"),
    ];
    for (body, file) in cases {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_doc(dir.path(), body), 0, "{body}");
        assert!(!read(dir.path(), file).is_empty(), "{file}");
        let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
        assert_eq!(manifest["exit_status"], 0);
        assert!(manifest["config"]["command"].is_string());
    }
}

#[test]
fn outputs_are_reproducible() {
    let body = r#""command": "identify-base", "family": {"kind": "moran", "N": 5}, "cap": 40, "reps": 300, "grid": [0, 2, 4], "seed": 8"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_doc(a.path(), body);
    run_doc(b.path(), body);
    assert_eq!(read(a.path(), "identify_base.csv"), read(b.path(), "identify_base.csv"));
    let header = read(a.path(), "identify_base.csv");
    assert!(header.starts_with("n,t_n,rho_hat,se\n"));
}

#[test]
fn doubling_family_reports_no_fixation() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#""command": "fixation", "family": {"kind": "asynchronous", "x0": 1, "b": "doubling"}, "cap": 12, "reps": 100, "n": 1"#;
    assert_eq!(run_doc(dir.path(), body), 0);
    let csv = read(dir.path(), "fixation.csv");
    assert_eq!(csv.lines().count(), 101);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1) == Some("false")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, config(dir.path(), r#""command": "coalescent", "family": {"kind": "moran", "N": 3}, "cap": 5"#)).unwrap();
    assert_eq!(main_with_args(["lookdown", good.to_str().unwrap(), "--threads", "2", "--seed", "4"]), 0);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"command\": \"coalescent\",").unwrap();
    assert_eq!(main_with_args(["lookdown", bad.to_str().unwrap()]), 2);
    fs::write(&bad, r#"{"command": "teleport", "family": {"kind": "moran", "N": 3}}"#).unwrap();
    assert_eq!(main_with_args(["lookdown", bad.to_str().unwrap()]), 2);
    assert_eq!(main_with_args(["lookdown", "--no-such-flag"]), 2);
    assert_eq!(main_with_args(["lookdown", dir.path().join("missing.json").to_str().unwrap()]), 2);
}
