use std::path::PathBuf;
use std::process::{Command, Output};

fn bench_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("benchmarks").join(format!("{name}.fps"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpcheck")).args(args).env_remove("FPCS_LOG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_exit_codes_follow_the_status() {
    let slope = bench_file("slope");
    let slope = slope.to_str().unwrap();
    let o = run(&["solve", slope, "--suspect", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("status:   sat"));

    let o = run(&["solve", slope, "--suspect", "2", "--out", "json", "--strategy", "std"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["status"], "unsat");
    assert_eq!(doc["strategy"], "std");

    let o = run(&["solve", slope, "--suspect", "2", "--strategy", "fpc3s"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", slope, "--suspect", "0", "--node-limit", "1", "--shave", "off"]);
    assert!(matches!(o.status.code(), Some(0 | 2)));
}

#[test]
fn usage_errors_exit_above_two() {
    let slope = bench_file("slope");
    let slope = slope.to_str().unwrap();
    assert_eq!(run(&["solve", slope]).status.code(), Some(3));
    assert_eq!(run(&["solve", slope, "--suspect", "9"]).status.code(), Some(3));
    assert_eq!(run(&["solve", slope, "--strategy", "dfs"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "/nonexistent.fps"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = std::env::temp_dir().join(format!("fpcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let none = dir.join("none.fps");
    std::fs::write(&none, "input x in [0, 1];\ny = x + 1;\n").unwrap();
    let o = run(&["solve", none.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("annotation"));
    let bad = dir.join("bad.fps");
    std::fs::write(&bad, "input x in [0, 1];\ny = x +;\n").unwrap();
    let o = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eval_prints_values_and_the_real_column() {
    let heron = bench_file("heron");
    let o = run(&[
        "eval",
        heron.to_str().unwrap(),
        "--input",
        "a=5.517474",
        "--input",
        "b=4.7105823",
        "--input",
        "c=0.8068917",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("squared_area")).unwrap();
    assert!(line.contains("-1.0000001e-5"), "{line}");
    assert!(out.contains("annotation 0: ") && out.contains("in interval"));

    let slope = bench_file("slope");
    let o = run(&["eval", slope.to_str().unwrap(), "--input", "x0=13", "--input", "h=1e-4", "--out", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let real = doc["values"]["res"]["real"].as_f64().unwrap();
    assert!((real - 26.0).abs() < 1e-9, "{real}");

    let o = run(&["eval", slope.to_str().unwrap(), "--input", "x0=14", "--input", "h=1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside its declared range"));
    assert_eq!(run(&["eval", slope.to_str().unwrap(), "--input", "x0=13"]).status.code(), Some(3));
}

#[test]
fn gentest_reports_a_verified_hit() {
    let slope = bench_file("slope");
    let o = run(&["gentest", slope.to_str().unwrap(), "--suspect", "1", "--seed", "5", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((doc["status"].as_str(), doc["verified"].as_bool()), (Some("sat"), Some(true)));
    let again = run(&["gentest", slope.to_str().unwrap(), "--suspect", "1", "--seed", "5", "--out", "json"]);
    let doc2: serde_json::Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(doc["witness"], doc2["witness"]);
}
