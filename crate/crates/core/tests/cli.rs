use std::path::Path;
use std::process::{Command, Output};

use qgeom::linalg::pauli::sigma;
use qgeom::linalg::{HermitianMatrix, MatrixJson};
use qgeom::state::validate_state_tol;
use serde_json::{json, Value};

fn qgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgeom")).args(args).output().expect("binary runs")
}

fn write_matrix(dir: &Path, name: &str, m: &HermitianMatrix) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&MatrixJson::from_matrix(m)).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_maximally_mixed_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", &HermitianMatrix::identity(2).scale(0.5));
    let out = qgeom(&["classify", &rho]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 2);
    assert!((v["purity"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((v["entropy"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert!(v["r2"].as_f64().unwrap().abs() < 1e-15);
    assert_eq!(v["config"]["command"], "classify");
}

#[test]
fn classify_rejects_non_states() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_matrix(dir.path(), "bad.json", &HermitianMatrix::from_real_diag(&[1.5, -0.5]));
    let out = qgeom(&["classify", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "not_positive");

    let out = qgeom(&["classify", "/nonexistent/rho.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn usage_errors() {
    assert_eq!(qgeom(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(qgeom(&["classify", "--no-such-flag", "x"]).status.code(), Some(64));
    assert_eq!(qgeom(&["--version"]).status.code(), Some(0));
}

#[test]
fn basis_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.json");
    let out = qgeom(&["basis", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["h"].as_array().unwrap().len(), 8);
    assert_eq!(v["c"].as_array().unwrap().len(), 8);
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn flow_with_zero_generators_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", &HermitianMatrix::from_real_diag(&[0.7, 0.2, 0.1]));
    let spec = dir.path().join("flow.json");
    std::fs::write(&spec, json!({"kind": "sl_combined", "t_final": 0.5, "dt": 0.1}).to_string()).unwrap();
    let out = qgeom(&["flow", "--spec", spec.to_str().unwrap(), "--state", &rho]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header.len(), 1 + 8 + 2 + 3);
    assert_eq!(header[0], "t");
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        assert_eq!(&row[1..], &rows[0][1..]);
    }
}

#[test]
fn flow_rows_are_states_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", &HermitianMatrix::from_real_diag(&[0.6, 0.4]));
    let spec = dir.path().join("flow.json");
    let a = MatrixJson::from_matrix(&sigma(1));
    let b = MatrixJson::from_matrix(&sigma(3).scale(0.5));
    std::fs::write(
        &spec,
        json!({"kind": "sl_combined", "a": a, "b": b, "t_final": 1.0, "dt": 0.01, "record_every": 10}).to_string(),
    )
    .unwrap();
    let args = ["flow", "--spec", spec.to_str().unwrap(), "--state", &rho];
    let first = qgeom(&args);
    let second = qgeom(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let closed = qgeom(&[&args[..], &["--closed-form"]].concat());
    let (_, rk) = csv_rows(std::str::from_utf8(&first.stdout).unwrap());
    let (_, cf) = csv_rows(std::str::from_utf8(&closed.stdout).unwrap());
    assert_eq!(rk.len(), 11);
    assert_eq!(rk.len(), cf.len());
    for (x, y) in rk.iter().zip(&cf) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() <= 1e-6);
        }
        // rebuild the state from t, x_1..x_3 and validate it
        let basis = qgeom::su_basis::gellmann_basis(2).unwrap();
        let coords = qgeom::su_basis::CoordinateVector { n: 2, x: x[1..4].to_vec() };
        let m = qgeom::su_basis::from_coordinates(&coords, &basis).unwrap();
        assert!(validate_state_tol(&m, 1e-8, 1e-8).is_ok());
    }
}

#[test]
fn flow_leaving_state_space_exits_1_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", &HermitianMatrix::from_real_diag(&[0.5, 0.5]).add(&sigma(1).scale(0.5)));
    let spec = dir.path().join("flow.json");
    let b = MatrixJson::from_matrix(&sigma(3).scale(4.0));
    // the step is far too coarse for this generator
    std::fs::write(&spec, json!({"kind": "gradient_like", "b": b, "t_final": 2.0, "dt": 0.4}).to_string()).unwrap();
    let out = qgeom(&["flow", "--spec", spec.to_str().unwrap(), "--state", &rho]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "left_state_space");
    let (_, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
}

#[test]
fn kahler_check_report() {
    let out = qgeom(&["kahler-check", "--n", "3", "--samples", "5", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(qgeom(&["kahler-check", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn qubit_demo_keeps_radius_for_l3() {
    let out = qgeom(&["qubit-demo", "--field", "L3", "--start", "0.3,-0.4,0.5", "--t", "1", "--dt", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["t", "x1", "x2", "x3", "r"]);
    let r0 = rows[0][4];
    assert!(rows.iter().all(|r| (r[4] - r0).abs() < 1e-9));
    assert_eq!(qgeom(&["qubit-demo", "--field", "L3", "--start", "1,1,1", "--t", "1"]).status.code(), Some(1));
    assert_eq!(qgeom(&["qubit-demo", "--field", "Q3", "--start", "0,0,1", "--t", "1"]).status.code(), Some(64));
}

#[test]
fn entangle_bell_and_product() {
    let dir = tempfile::tempdir().unwrap();
    let bell = HermitianMatrix::projector(&qgeom::composite::bell_vector());
    let path = write_matrix(dir.path(), "bell.json", &bell);
    let out = qgeom(&["entangle", "--state", &path, "--dims", "2x2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["results"]["ppt"]["ppt"], false);
    assert!((v["results"]["ppt"]["min_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(v["results"]["ball"]["certified"], false);
    assert_eq!(v["results"]["product"]["product"], false);
    assert_eq!(v["results"]["abrank"]["error"], "not_product");

    let mixed = write_matrix(dir.path(), "mixed.json", &HermitianMatrix::identity(4).scale(0.25));
    let out = qgeom(&["entangle", "--state", &mixed, "--dims", "2x2", "--tests", "ball,abrank"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["ball"]["certified"], true);
    assert_eq!(v["results"]["abrank"], json!({"k_a": 2, "k_b": 2}));
    assert!(v["results"].get("ppt").is_none());

    assert_eq!(qgeom(&["entangle", "--state", &mixed, "--dims", "2x3"]).status.code(), Some(1));
    assert_eq!(qgeom(&["entangle", "--state", &mixed, "--dims", "2by2"]).status.code(), Some(64));
}

#[test]
fn selftest_is_byte_identical_and_names_failures() {
    let a = qgeom(&["selftest", "--seed", "3"]);
    let b = qgeom(&["selftest", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(err["failed"], json!(["8b"]));
    let report = stdout_json(&a);
    assert_eq!(report["seed"], 3);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 11);
}

#[test]
fn thread_cap_does_not_change_output() {
    let capped = Command::new(env!("CARGO_BIN_EXE_qgeom"))
        .args(["selftest", "--seed", "5"])
        .env(qgeom::par::THREADS_ENV, "1")
        .output()
        .unwrap();
    let free = qgeom(&["selftest", "--seed", "5"]);
    assert_eq!(capped.stdout, free.stdout);
}
