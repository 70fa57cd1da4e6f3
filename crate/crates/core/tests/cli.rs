//! End-to-end tests of the `ahom` binary: exit codes, error messages,
//! emitted files, and run-to-run determinism through the real CLI.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn ahom() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ahom"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).expect("config written");
    path
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn unknown_problem_fails_and_names_it() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"problem": {"name": "banana"}, "algorithms": ["gd"]}"#,
    );
    let output = ahom()
        .args(["run"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(!output.status.success(), "bad problem name must fail");
    assert!(
        stderr_of(&output).contains("banana"),
        "stderr must name the unknown problem: {}",
        stderr_of(&output)
    );
}

#[test]
fn unknown_algorithm_fails_and_names_it() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"problem": {"name": "monkey"}, "algorithms": ["gd", "sgd"]}"#,
    );
    let output = ahom()
        .args(["run"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("sgd"));
}

#[test]
fn missing_dataset_fails_and_names_the_path() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "logistic.json",
        r#"{"problem": {"name": "logistic", "dataset_path": "/missing/sonar.libsvm"}, "algorithms": ["arc"]}"#,
    );
    let output = ahom()
        .args(["run"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    assert!(
        stderr_of(&output).contains("/missing/sonar.libsvm"),
        "stderr must name the missing dataset: {}",
        stderr_of(&output)
    );
}

#[test]
fn missing_config_file_fails_and_names_the_path() {
    let output = ahom()
        .args(["run", "/nowhere/experiment.json"])
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("/nowhere/experiment.json"));
}

#[test]
fn check_derivatives_passes_every_problem() {
    for args in [
        vec!["check-derivatives", "monkey"],
        vec!["check-derivatives", "coercive"],
        vec!["check-derivatives", "quadratic", "--dim", "5"],
        vec!["check-derivatives", "logistic", "--synthetic", "20,5,3"],
    ] {
        let output = ahom().args(&args).output().expect("binary runs");
        assert!(
            output.status.success(),
            "{args:?} failed: {}",
            stderr_of(&output)
        );
        let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
        assert!(
            stdout.contains("all orders within"),
            "{args:?} did not report success: {stdout}"
        );
    }
}

#[test]
fn bounds_prints_the_quadratic_worst_case_as_json() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "quad.json",
        r#"{"problem": {"name": "quadratic"}, "algorithms": ["ahom"]}"#,
    );
    let output = ahom()
        .args(["bounds"])
        .arg(&config)
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "{}", stderr_of(&output));
    let stdout = String::from_utf8_lossy(&output.stdout);
    let bounds: serde_json::Value =
        serde_json::from_str(&stdout).expect("bounds output is JSON");
    // The bowl has a unit Lipschitz gradient: σ_max = max(σ0, 3·γ3·L/(2·(1−η2))) = 30.
    let sigma_max = bounds["sigma_max"].as_f64().expect("sigma_max present");
    assert!((sigma_max - 30.0).abs() < 1e-9, "sigma_max = {sigma_max}");
    // κ never grows on a problem with a vanishing third derivative.
    assert_eq!(bounds["u_third1_cap"].as_u64(), Some(0));
    assert!(bounds["total_iter_cap"].as_f64().is_some());
}

#[test]
fn reruns_with_one_seed_are_identical_outside_wall_time() {
    let dir = tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "monkey.json",
        r#"{
            "problem": {"name": "monkey"},
            "algorithms": ["gd", "arc", "tr", "ahom"],
            "init": {"explicit": [1.0, 0.0]},
            "seed": 42
        }"#,
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = ahom()
            .args(["run"])
            .arg(&config)
            .arg("--out-dir")
            .arg(out)
            .output()
            .expect("binary runs");
        assert!(output.status.success(), "{}", stderr_of(&output));
    }

    for name in [
        "gd_trace.csv",
        "arc_trace.csv",
        "tr_trace.csv",
        "ahom_trace.csv",
        "summary.csv",
    ] {
        let a = fs::read_to_string(out_a.join(name)).expect("first run file");
        let b = fs::read_to_string(out_b.join(name)).expect("second run file");
        assert_eq!(
            mask_wall_time(&a),
            mask_wall_time(&b),
            "{name} differs between identically-seeded runs"
        );
    }
}

/// Blanks the wall_time_s column (index 1) of CSV data rows; header and
/// non-trace files (whose second column is not wall time) are left alone
/// by matching on the trace header.
fn mask_wall_time(text: &str) -> String {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    if !header.starts_with("iter,wall_time_s") {
        return text.to_string();
    }
    let mut masked = vec![header.to_string()];
    for line in lines {
        let mut fields: Vec<&str> = line.split(',').collect();
        if fields.len() > 1 {
            fields[1] = "";
        }
        masked.push(fields.join(","));
    }
    masked.join("\n")
}
