//! End-to-end tests of the binary: exit codes, error records, output
//! determinism, and manifest completeness.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skinburst"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
[lattice]
N = 20
J = 1.0
t = 0.5
gamma = 0.5
eta = 0.001
impurities = [8]
"#;

const DYNAMIC: &str = r#"
[lattice]
N = 12
J = 1.0
t = 0.5
gamma = 0.5
eta = 1.0
impurities = [4]

[dynamics]
n0 = 10
t_max = 150.0
"#;

fn stderr_record(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or(serde_json::json!({}))
}

#[test]
fn missing_config_gives_machine_readable_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["spectrum", "--config", "/definitely/not/here.toml", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["error"], "config_not_found");
}

#[test]
fn bad_initial_cell_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.toml", DYNAMIC);
    let out = bin()
        .args(["dynamics", "--config", &config, "--n0", "0", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["error"], "bad_initial_cell");
}

#[test]
fn spectrum_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.toml", SMALL);
    for dir in ["a", "b"] {
        let status = bin()
            .args(["spectrum", "--config", &config, "--classify", "--limit", "pbc", "--out"])
            .arg(tmp.path().join(dir))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["spectrum.csv", "limit_pbc.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn manifest_names_every_emitted_file() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.toml", SMALL);
    let out_dir = tmp.path().join("out");
    let status = bin()
        .args(["spectrum", "--config", &config, "--dump-hamiltonian", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    let listed: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["path"].as_str().unwrap().to_string())
        .collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|name| name != "manifest.json")
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    // digests are present and well-formed
    for entry in manifest["outputs"].as_array().unwrap() {
        assert_eq!(entry["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn eigenstate_export_has_fit_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.toml", SMALL);
    let out_dir = tmp.path().join("out");
    let status = bin()
        .args(["eigenstates", "--config", &config, "--select", "max-im", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let lyap = std::fs::read_to_string(out_dir.join("lyapunov.csv")).unwrap();
    let mut rows = 0;
    for line in lyap.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        let analytic: f64 = cols[2].parse().unwrap();
        let fitted: f64 = cols[3].parse().unwrap();
        assert!((analytic - fitted).abs() < 1e-6 * analytic.abs().max(1.0));
        rows += 1;
    }
    assert_eq!(rows, 40, "one row per loop eigenvalue");
}

#[test]
fn scan_mode_emits_summary_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.toml", DYNAMIC);
    let out_dir = tmp.path().join("out");
    let status = bin()
        .args([
            "dynamics",
            "--config",
            &config,
            "--scan",
            "-1:1:21",
            "--sites",
            "4,5",
            "--t-max",
            "150",
            "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out_dir.join("scan_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3, "header plus one row per site");
    let scan = std::fs::read_to_string(out_dir.join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 1 + 2 * 21);
    assert!(out_dir.join("plot_scan.gp").exists());
}

#[test]
fn validate_exit_code_matches_report() {
    // quick suite; exit must be 0 iff no criterion line says FAIL
    let out = bin().args(["validate", "--suite", "quick"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failures = stdout.lines().filter(|l| l.starts_with("criterion") && l.contains("FAIL")).count();
    let code = out.status.code();
    if failures == 0 {
        assert_eq!(code, Some(0));
    } else {
        assert_eq!(code, Some(1));
        assert_eq!(stderr_record(&out)["error"], "validation_failed");
    }
    // every quick-suite criterion is reported
    for id in [1, 2, 3, 4, 5, 10] {
        assert!(
            stdout.lines().any(|l| l.starts_with(&format!("criterion {id:2} "))),
            "criterion {id} missing from the report"
        );
    }
}
