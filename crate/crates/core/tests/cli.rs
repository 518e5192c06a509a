use std::fs;
use std::path::Path;

use roughpower::cli::{run, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_INSUFFICIENT, EXIT_PASS};

fn call(cmd: &str, config: &Path, out: &Path) -> i32 {
    run([
        "roughpower",
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const GEN: &str = r#"{"schema_version": 1, "driver": {"hurst": 0.4, "dim": 1, "n": 4096, "refine": 4, "seed": 7}}"#;

#[test]
fn gen_path_is_deterministic_and_creates_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gen.json", GEN);
    let a = dir.path().join("nested/a");
    let b = dir.path().join("b");
    assert_eq!(call("gen-path", &cfg, &a), EXIT_PASS);
    assert_eq!(call("gen-path", &cfg, &b), EXIT_PASS);
    for f in ["path.csv", "area.csv", "meta.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn gen_path_rejects_bad_hurst_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"schema_version": 1, "driver": {"hurst": 0.2, "n": 64, "seed": 1}}"#);
    assert_eq!(call("gen-path", &bad, &dir.path().join("o")), EXIT_CONFIG);
    let old = write(dir.path(), "old.json", r#"{"schema_version": 9, "driver": {"hurst": 0.4, "n": 64, "seed": 1}}"#);
    assert_eq!(call("gen-path", &old, &dir.path().join("o")), EXIT_CONFIG);
    assert_eq!(call("gen-path", &dir.path().join("missing.json"), &dir.path().join("o")), EXIT_CONFIG);
}

#[test]
fn verify_passes_then_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gen.json", GEN);
    assert_eq!(call("gen-path", &cfg, &dir.path().join("p")), EXIT_PASS);
    let v = write(dir.path(), "v.json", r#"{"schema_version": 1, "driver_dir": "p", "coefficient": {"kappa": 0.8}}"#);
    assert_eq!(call("verify", &v, &dir.path().join("v")), EXIT_PASS);

    let area = dir.path().join("p/area.csv");
    let text = fs::read_to_string(&area).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[100] = "99,100,0.5".into();
    fs::write(&area, lines.join("\n") + "\n").unwrap();
    assert_eq!(call("verify", &v, &dir.path().join("v2")), EXIT_CHECK_FAILED);
    let report = fs::read_to_string(dir.path().join("v2/verify.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let chen = json["checks"].as_array().unwrap().iter().find(|c| c["name"] == "chen").unwrap();
    assert_eq!(chen["pass"], false);
}

#[test]
fn verify_names_the_exponent_failure() {
    let dir = tempfile::tempdir().unwrap();
    let v = write(
        dir.path(),
        "v.json",
        r#"{"schema_version": 1, "driver": {"hurst": 0.42, "n": 512, "seed": 2}, "coefficient": {"kappa": 0.3}}"#,
    );
    assert_eq!(call("verify", &v, &dir.path().join("v")), EXIT_CHECK_FAILED);
    let report = fs::read_to_string(dir.path().join("v/verify.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let failed: Vec<&str> = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"kappa+gamma"), "{failed:?}");
}

#[test]
fn solve_writes_both_solutions_from_zero() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"schema_version": 1, "driver": {"hurst": 0.45, "n": 1024, "seed": 3},
            "coefficient": {"kappa": 0.8}, "solver": {"mode": "lamperti", "initial": [0.0]}}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(call("solve", &s, &out), EXIT_PASS);
    for f in ["solution.csv", "shells.json", "solution_trivial.csv", "shells_trivial.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn solve_labels_zero_hit_as_case_b() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"schema_version": 1, "driver": {"hurst": 0.42, "n": 262144, "seed": 6},
            "coefficient": {"kappa": 0.8, "c1": 4.0}, "solver": {"initial": [0.25]}}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(call("solve", &s, &out), EXIT_PASS);
    let shells: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("shells.json")).unwrap()).unwrap();
    assert_eq!(shells["case"], "B");
    let header = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(header.starts_with("t,y1\n"));
}

#[test]
fn study_on_bundled_fixture_writes_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/case_b_scaling.json");
    let out = dir.path().join("study");
    assert_eq!(call("study", &fixture, &out), EXIT_PASS);
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["q", "y_gamma", "remainder_3gamma", "y_slope", "remainder_slope", "r_slope"] {
        assert!(header.split(',').any(|c| c == col), "{col}");
    }
}

#[test]
fn study_reports_insufficient_shells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "st.json",
        r#"{"schema_version": 1, "study": "scaling", "driver": {"hurst": 0.45, "n": 1024, "seed": 1},
            "coefficient": {"kappa": 0.8}, "solver": {"initial": [0.9]}}"#,
    );
    assert_eq!(call("study", &cfg, &dir.path().join("o")), EXIT_INSUFFICIENT);
}

#[test]
fn ito_study_has_fitted_order_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ito.json",
        r#"{"schema_version": 1, "study": "ito_stratonovich", "driver": {"hurst": 0.4, "n": 16384, "seed": 5},
            "functions": ["sin"], "depths": [8, 9, 10, 11, 12, 13, 14]}"#,
    );
    let out = dir.path().join("o");
    assert_eq!(call("study", &cfg, &out), EXIT_PASS);
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.starts_with("function,depth,sup_residual,fitted_order\n"));
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn eps2_outside_its_bound_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "st.json",
        r#"{"schema_version": 1, "study": "gaps", "driver": {"hurst": 0.42, "n": 1024, "seed": 1},
            "coefficient": {"kappa": 0.8}, "solver": {"initial": [0.5]}, "eps2": 0.5}"#,
    );
    assert_eq!(call("study", &cfg, &dir.path().join("o")), EXIT_CONFIG);
}

#[test]
fn binary_reports_exit_codes() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_roughpower"))
        .args(["study", "--config", "/nonexistent.json", "--out", "/tmp/unused"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_CONFIG));
}
