//! End-to-end tests of the `epdice` binary: artifacts, exit codes, and
//! byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epdice"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    dir
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {}: {e}", dir.join(name).display()))
}

/// Manifest with the wall-clock field (the one run-dependent value) removed.
fn manifest_without_timing(dir: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&read(dir, "manifest.json")).unwrap();
    let obj = v.as_object_mut().unwrap();
    assert!(obj.remove("wall_clock_seconds").is_some());
    v
}

#[test]
fn run_writes_artifacts_and_converges() {
    let dir = tmp("run-basic");
    let output = bin().args(["run", "rpe-ep", "--out-dir"]).arg(&dir).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir, "rpe-ep_summary.json")).unwrap();
    assert_eq!(summary["scenario"], "rpe-ep");
    assert_eq!(summary["converged"], true);
    let scc_2020 = summary["scc_2020"].as_f64().unwrap();
    assert!((scc_2020 - 139.0).abs() <= 13.9, "scc_2020 = {scc_2020}");

    let csv = read(&dir, "rpe-ep_trajectory.csv");
    assert!(csv.starts_with("year,mu,s,"));
    assert_eq!(csv.lines().count(), 61, "header plus one row per period");

    let manifest: serde_json::Value = serde_json::from_str(&read(&dir, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "run rpe-ep");
    assert_eq!(manifest["converged"]["rpe-ep"], true);
    assert!(!manifest["calibration_version"].as_str().unwrap().is_empty());
    for name in manifest["outputs"].as_array().unwrap() {
        assert!(dir.join(name.as_str().unwrap()).exists(), "missing output {name}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tmp("run-det-a"), tmp("run-det-b"));
    for dir in [&a, &b] {
        let output = bin().args(["run", "rpe", "--out-dir"]).arg(dir).output().unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    assert_eq!(read(&a, "rpe_trajectory.csv"), read(&b, "rpe_trajectory.csv"));
    assert_eq!(read(&a, "rpe_summary.json"), read(&b, "rpe_summary.json"));
    assert_eq!(manifest_without_timing(&a), manifest_without_timing(&b));
}

#[test]
fn unknown_scenario_exits_one_and_lists_names() {
    let output = bin().args(["run", "bogus", "--out-dir"]).arg(tmp("run-bogus")).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    for name in ["dice", "bau", "rpe", "rpe-ep"] {
        assert!(err.contains(name), "stderr should list '{name}': {err}");
    }
}

#[test]
fn invalid_params_file_exits_one() {
    let dir = tmp("run-bad-params");
    fs::create_dir_all(&dir).unwrap();
    let params = dir.join("bad.conf");
    fs::write(&params, "theta = -2\n").unwrap();
    let output = bin()
        .args(["run", "rpe-ep", "--params"])
        .arg(&params)
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("theta"), "stderr: {}", stderr(&output));

    let output = bin()
        .args(["run", "rpe-ep", "--params", "/nonexistent.conf", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn params_file_changes_results_and_hash() {
    let (base, alt) = (tmp("run-hash-a"), tmp("run-hash-b"));
    let output = bin().args(["run", "bau", "--out-dir"]).arg(&base).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    fs::create_dir_all(&alt).unwrap();
    let params = alt.join("override.conf");
    fs::write(&params, "horizon = 24\n").unwrap();
    let output = bin()
        .args(["run", "bau", "--params"])
        .arg(&params)
        .arg("--out-dir")
        .arg(&alt)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    assert_eq!(read(&alt, "bau_trajectory.csv").lines().count(), 25);
    let ma: serde_json::Value = serde_json::from_str(&read(&base, "manifest.json")).unwrap();
    let mb: serde_json::Value = serde_json::from_str(&read(&alt, "manifest.json")).unwrap();
    assert_ne!(ma["params_hash"], mb["params_hash"]);
}

#[test]
fn calibration_env_var_replaces_the_bundled_file() {
    let dir = tmp("run-env");
    fs::create_dir_all(&dir).unwrap();
    // A full calibration file: the bundled text with a shortened horizon.
    let mut params = epdice::ModelParams::baseline().unwrap();
    params.apply_config_text("horizon = 30").unwrap();
    params.validate().unwrap();
    let calib = dir.join("full.conf");
    fs::write(&calib, params.to_config_text()).unwrap();

    let output = bin()
        .args(["run", "bau", "--out-dir"])
        .arg(&dir)
        .env("EPDICE_CALIBRATION", &calib)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert_eq!(read(&dir, "bau_trajectory.csv").lines().count(), 31);
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let (a, b) = (tmp("sweep-j1"), tmp("sweep-j3"));
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let output = bin()
            .args(["sweep", "--grid", "theta=0.5,1 beta_mu=0:0.02:0.02", "--jobs", jobs, "--out-dir"])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    assert_eq!(read(&a, "sweep_cells.csv"), read(&b, "sweep_cells.csv"));
    assert_eq!(read(&a, "sweep_matrix.csv"), read(&b, "sweep_matrix.csv"));
    assert_eq!(manifest_without_timing(&a), manifest_without_timing(&b));

    let matrix = read(&a, "sweep_matrix.csv");
    assert_eq!(matrix.lines().count(), 3, "header plus one row per theta: {matrix}");
    assert!(matrix.starts_with("theta,beta_mu=0,beta_mu=0.02\n"));
}

#[test]
fn sweep_with_failing_cell_exits_two_and_lists_it() {
    let dir = tmp("sweep-fail");
    let output = bin()
        .args(["sweep", "--grid", "theta=0.5,-1", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("theta=-1"), "stderr should name the failed cell: {err}");
    assert!(err.contains("1 of 2 cells failed"), "stderr: {err}");
    // The per-cell CSV still records the good cell and the failure reason.
    let cells = read(&dir, "sweep_cells.csv");
    assert_eq!(cells.lines().count(), 3);
    let manifest: serde_json::Value = serde_json::from_str(&read(&dir, "manifest.json")).unwrap();
    assert_eq!(manifest["converged"]["theta=0.5"], true);
    assert_eq!(manifest["converged"]["theta=-1"], false);
}

#[test]
fn malformed_grid_exits_one() {
    let output = bin()
        .args(["sweep", "--grid", "theta=0.1:0.1", "--out-dir"])
        .arg(tmp("sweep-bad"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("range"), "stderr: {}", stderr(&output));
}

#[test]
fn figures_panels_have_reporting_window_rows() {
    let dir = tmp("figures-2");
    let output = bin()
        .args(["figures", "--scenario-set", "figure-2", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    // Three scenarios, 18 report years (2015-2100), one header line.
    for panel in ["temperature", "emissions", "scc", "rpe"] {
        let csv = read(&dir, &format!("figure2_{panel}.csv"));
        assert_eq!(csv.lines().count(), 1 + 3 * 18, "panel {panel}");
        assert!(csv.starts_with("scenario,year,value\n"));
    }
}

#[test]
fn figure3_reports_the_business_as_usual_stock_path() {
    let dir = tmp("figures-3");
    let output = bin()
        .args(["figures", "--scenario-set", "figure-3", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let stock = read(&dir, "figure3_stock.csv");
    let bau_2100: f64 = stock
        .lines()
        .find_map(|l| l.strip_prefix("bau,2100,"))
        .expect("bau 2100 row present")
        .parse()
        .unwrap();
    assert!((bau_2100 - 0.792).abs() <= 0.01, "remaining stock fraction {bau_2100}");
}

#[test]
fn figure4_sweeps_the_feedback_coefficient() {
    let dir = tmp("figures-4");
    let output = bin()
        .args(["figures", "--scenario-set", "figure-4", "--jobs", "2", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let scc = read(&dir, "figure4_scc2020.csv");
    assert_eq!(scc.lines().count(), 7);
    let at = |label: &str| -> f64 {
        scc.lines()
            .find_map(|l| l.strip_prefix(&format!("{label},")))
            .unwrap_or_else(|| panic!("row {label} in {scc}"))
            .parse()
            .unwrap()
    };
    assert!((at("0") - 125.0).abs() <= 12.5);
    assert!((at("0.04") - 153.0).abs() <= 15.3);
    assert!(at("-0.01") < at("0") && at("0") < at("0.04"));
}

#[test]
fn unknown_figure_set_exits_one() {
    let output = bin()
        .args(["figures", "--scenario-set", "figure-9", "--out-dir"])
        .arg(tmp("figures-bad"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("figure-2"), "stderr: {}", stderr(&output));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let output = bin().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let output = bin().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stdout).contains("sweep"));
}
