use std::path::PathBuf;
use std::process::{Command, Output};

use gmwp::{CenterMatrix, GaugeSet, Matrix, ProblemInstance};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gmwp"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "gmwp {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn centers_of(v: &Value) -> CenterMatrix {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v["centers"].clone()).unwrap();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn solve_triangle_reaches_one() {
    let out = run_ok(&[
        "solve",
        "--data",
        &data("triangle.csv"),
        "--k",
        "2",
        "--variant",
        "abdca",
        "--delta",
        "0.8",
        "--init-box",
        "0",
        "0.5",
        "--seed",
        "1",
    ]);
    let v = json_of(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-4, "{v}");
    assert_eq!(v["variant"], "abdca");
    assert_eq!(v["clustering"]["clusters"].as_array().unwrap().len(), 2);
}

#[test]
fn oracle_square_linf() {
    let v = json_of(&run_ok(&[
        "oracle",
        "--data",
        &data("square.csv"),
        "--k",
        "2",
        "--gauge",
        "linf",
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!(v["lower_bound"].as_f64().unwrap() <= v["value"].as_f64().unwrap());
    assert_eq!(v["partitions_checked"], 7);
}

#[test]
fn solve_json_reproduces_value() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("solve.json");
    run_ok(&[
        "solve",
        "--data",
        &data("iris.csv"),
        "--k",
        "3",
        "--gauge",
        "l1",
        "--runs",
        "2",
        "--out",
        json.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let a = gmwp::io::load_points_csv(data("iris.csv")).unwrap();
    let p = ProblemInstance::new(a, 3, GaugeSet::l1()).unwrap();
    let value = p.objective_true(&centers_of(&v)).unwrap();
    assert!((value - v["value"].as_f64().unwrap()).abs() <= 1e-12 * value.max(1.0));
}

#[test]
fn trace_has_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run_ok(&[
        "solve",
        "--data",
        &data("square.csv"),
        "--k",
        "2",
        "--runs",
        "1",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    let v = json_of(&out);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), gmwp::io::TRACE_HEADER);
    assert_eq!(lines.count() as u64, v["iterations"].as_u64().unwrap());
}

#[test]
fn certify_reports_local_square() {
    let dir = tempfile::tempdir().unwrap();
    let centers = dir.path().join("centers.csv");
    std::fs::write(&centers, "0.5,0\n0.5,1\n").unwrap();
    let v = json_of(&run_ok(&[
        "certify",
        "--data",
        &data("square.csv"),
        "--k",
        "2",
        "--centers",
        centers.to_str().unwrap(),
        "--tol",
        "1e-3",
    ]));
    assert_eq!(v["status"], "local");
}

#[test]
fn tsplib_is_accepted() {
    let v = json_of(&run_ok(&[
        "solve",
        "--data",
        &data("small.tsp"),
        "--k",
        "2",
        "--runs",
        "2",
    ]));
    assert!(v["value"].as_f64().unwrap() < 1e-4, "{v}");
}

#[test]
fn constrained_solve_is_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let cons = dir.path().join("cons.txt");
    std::fs::write(&cons, "center *\nball 0.5 0.5 0.25\n").unwrap();
    let v = json_of(&run_ok(&[
        "solve",
        "--data",
        &data("square.csv"),
        "--k",
        "2",
        "--runs",
        "2",
        "--constraints",
        cons.to_str().unwrap(),
    ]));
    assert!(v["max_violation"].as_f64().unwrap() < 1e-4, "{v}");
}

fn strip_time_columns(csv: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&i| !header[i].contains("time"))
        .collect();
    std::iter::once(csv.lines().next().unwrap())
        .chain(lines)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| cells[i]).collect::<Vec<_>>().join(",")
        })
        .collect()
}

#[test]
fn compare_is_deterministic() {
    let args = [
        "compare",
        "--data",
        &data("uscity.csv"),
        "--k",
        "3",
        "--runs",
        "20",
        "--seed",
        "7",
    ];
    let first = run_ok(&args);
    let second = run_ok(&args);
    let a = strip_time_columns(&String::from_utf8(first.stdout).unwrap());
    let b = strip_time_columns(&String::from_utf8(second.stdout).unwrap());
    assert_eq!(a.len(), 4);
    assert_eq!(a, b);
}

#[test]
fn unknown_flag_fails() {
    let out = run(&[
        "solve",
        "--data",
        &data("square.csv"),
        "--k",
        "2",
        "--bogus",
    ]);
    assert!(!out.status.success());
}

#[test]
fn oracle_refuses_large_instances() {
    let out = run(&["oracle", "--data", &data("uscity.csv"), "--k", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("3^1217"), "{err}");
}

#[test]
fn missing_file_reports_path() {
    let out = run(&["solve", "--data", "/nonexistent/points.csv", "--k", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/points.csv"));
}

#[test]
fn bad_k_is_rejected() {
    let out = run(&["solve", "--data", &data("triangle.csv"), "--k", "5"]);
    assert!(!out.status.success());
}
