use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn switchreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchreg"))
        .args(args)
        .output()
        .unwrap()
}

fn switchreg_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchreg"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn generate(dir: &Path, name: &str, sigma: &str) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap();
    let out = switchreg(&[
        "generate", "--n", "2", "--d", "1", "--points", "9", "--sigma", sigma, "--seed", "3",
        "--out", p,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    p.to_string()
}

#[test]
fn generate_then_solve_with_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.json", "0.1");
    let mut costs = Vec::new();
    for method in ["brute", "enum", "altmin"] {
        let out = switchreg(&["solve", &data, "--method", method]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report = json(&out);
        assert_eq!(report["method"], method);
        assert_eq!(report["labels"][0], 1);
        assert_eq!(report["labels"].as_array().unwrap().len(), 9);
        assert!(String::from_utf8_lossy(&out.stderr).contains("label accuracy"));
        costs.push(report["cost"].as_f64().unwrap());
    }
    assert!((costs[0] - costs[1]).abs() < 1e-9);
    assert!(costs[2] >= costs[1] - 1e-9);
}

#[test]
fn noiseless_method_reports_infeasible_on_noisy_data() {
    let dir = tempfile::tempdir().unwrap();
    let noisy = generate(dir.path(), "noisy.csv", "0.1");
    let out = switchreg(&["solve", &noisy, "--method", "noiseless", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "infeasible");

    let clean = generate(dir.path(), "clean.json", "0");
    let out = switchreg(&["solve", &clean, "--method", "noiseless"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "optimal");
}

#[test]
fn csv_needs_an_explicit_mode_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.csv", "0.1");
    assert_eq!(switchreg(&["solve", &data]).status.code(), Some(2));
}

#[test]
fn partition_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("p.json");
    let data = data.to_str().unwrap();
    let out = switchreg(&["reduce-partition", "--values", "1,2,3", "--out", data]);
    assert_eq!(out.status.code(), Some(0));

    let cert = dir.path().join("cert.json");
    let out = switchreg(&[
        "solve",
        data,
        "--method",
        "brute",
        "--epsilon",
        "0",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = switchreg(&[
        "extract-partition",
        "--values",
        "1,2,3",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let split = json(&out);
    let sum = |k: &str| {
        split[k]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .sum::<u64>()
    };
    assert_eq!(sum("subset"), 3);
    assert_eq!(sum("complement"), 3);
}

#[test]
fn partition_decisions_set_the_exit_code() {
    let out = switchreg(&["reduce-partition", "--values", "1,1,1", "--decide", "brute"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.txt");
    std::fs::write(&file, "2 2\n").unwrap();
    let out = switchreg(&[
        "reduce-partition",
        "--file",
        file.to_str().unwrap(),
        "--decide",
        "noiseless",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let data = json(&out);
    assert_eq!(data["x"][4], serde_json::json!([2.0, 2.0]));
    assert_eq!(data["y"][4], 2.0);
}

#[test]
fn caps_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.json", "0.1");
    let out = switchreg_env(
        &["solve", &data, "--method", "brute"],
        "SWITCHREG_BRUTE_BUDGET",
        "10",
    );
    assert_eq!(out.status.code(), Some(3));
    let out = switchreg(&["solve", &data, "--n", "4", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_code_two() {
    assert_eq!(switchreg(&["solve"]).status.code(), Some(2));
    assert_eq!(
        switchreg(&["solve", "x.json", "--method", "magic"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.json", "0.1");
    let out = switchreg(&["solve", &data, "--method", "altmin", "--epsilon", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_csv_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.csv");
    std::fs::write(&file, "x1,x2,y\n1,2,3\n4,5\n").unwrap();
    let out = switchreg(&["solve", file.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), "d.json", "0.2");
    let run = |threads: &str| {
        let mut v = json(&switchreg(&["solve", &data, "--threads", threads]));
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn bench_reports_an_exponent() {
    let out = switchreg(&[
        "bench",
        "--method",
        "altmin",
        "--sizes",
        "50,100,200",
        "--repeats",
        "1",
        "--restarts",
        "2",
        "-q",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["fitted_exponent"].as_f64().is_some());
    assert_eq!(v["sizes"].as_array().unwrap().len(), 3);
    assert!(out.stderr.is_empty());
}
