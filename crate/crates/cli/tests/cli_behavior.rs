//! End-to-end tests of the `qmeas` binary: exit codes, JSON/CSV shape, and
//! byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn qmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const QUBIT_CONFIG: &str = r#"{
    "system_amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
    "apparatus_spectrum": [0.75, 0.25],
    "apparatus_dim": 2,
    "interaction": "shift",
    "optimizer": {"restarts": 1, "max_iters": 200, "seed": 7}
}"#;

const PURE_APPARATUS_CONFIG: &str = r#"{
    "system_amplitudes": [[0.6, 0.0], [0.8, 0.0]],
    "apparatus_spectrum": [1.0, 0.0],
    "apparatus_dim": 2,
    "interaction": "shift",
    "optimizer": {"restarts": 1, "max_iters": 200, "seed": 7}
}"#;

#[test]
fn run_emits_parseable_json_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let output = qmeas(&["run", "--config", &config]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let i_m = report["I_m"].as_f64().unwrap();
    assert!((i_m - 0.1887219).abs() < 1e-6);
    assert!(report["uncertainty_margin"].as_f64().unwrap().abs() < 1e-8);
    assert!(report.get("matrices").is_none(), "matrices only under --full");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "uncertainty_relation"));
    assert!(checks.iter().all(|c| c["status"] != "violated"));
}

#[test]
fn full_flag_attaches_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let output = qmeas(&["run", "--config", &config, "--full"]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["matrices"]["rho_f"].as_array().unwrap().len(), 4);
    assert!(report["e_re_ub"]["ansatz"].is_object());
}

#[test]
fn malformed_spectrum_names_the_field_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        &QUBIT_CONFIG.replace("[0.75, 0.25]", "[0.65, 0.25]"),
    );
    let output = qmeas(&["run", "--config", &config]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("apparatus_spectrum"), "stderr: {stderr}");
}

#[test]
fn missing_config_exits_one() {
    let output = qmeas(&["run", "--config", "/nonexistent/model.json"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(!output.stderr.is_empty());
}

#[test]
fn usage_errors_exit_one_not_two() {
    let output = qmeas(&["run"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn spectrum_sweep_produces_the_oracle_information_curve() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let out = dir.path().join("sweep.csv");
    let output = qmeas(&[
        "sweep", "--config", &config, "--param", "spectrum_p",
        "--steps", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,I_m,S_rho,sum,logN,margin,disturbance");
    assert_eq!(lines.len(), 4);
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for (expected_i_m, row) in [1.0, 0.0, 1.0].iter().zip(&rows) {
        assert!((row[1] - expected_i_m).abs() < 1e-8, "row: {row:?}");
        assert!((row[3] - row[4]).abs() < 1e-8, "sum must equal logN: {row:?}");
    }
}

#[test]
fn amplitude_sweep_covers_both_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pure.json", PURE_APPARATUS_CONFIG);
    let out = dir.path().join("amp.csv");
    let output = qmeas(&[
        "sweep", "--config", &config, "--param", "amp_theta",
        "--steps", "2", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));

    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][1].abs() < 1e-9);
    assert!((rows[1][1] - 1.0).abs() < 1e-9);
}

#[test]
fn minimal_two_step_sweep_has_exactly_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let out = dir.path().join("two.csv");
    let output = qmeas(&[
        "sweep", "--config", &config, "--param", "spectrum_p",
        "--steps", "2", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
}

#[test]
fn unknown_sweep_parameter_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let out = dir.path().join("x.csv");
    let output = qmeas(&[
        "sweep", "--config", &config, "--param", "bogus",
        "--steps", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn fuzz_campaign_passes_and_prints_a_tally() {
    let output = qmeas(&["fuzz", "--n", "4", "--seed", "11", "--max-dim", "3"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("models: 4"));
    assert!(text.contains("uncertainty_relation: passed=4 failed=0 inconclusive=0"));
}

#[test]
fn fuzz_with_zero_models_is_a_usage_error() {
    let output = qmeas(&["fuzz", "--n", "0", "--seed", "1"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn run_and_fuzz_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model.json", QUBIT_CONFIG);
    let run_a = qmeas(&["run", "--config", &config]);
    let run_b = qmeas(&["run", "--config", &config]);
    assert_eq!(run_a.stdout, run_b.stdout);

    let fuzz_a = qmeas(&["fuzz", "--n", "3", "--seed", "5", "--max-dim", "3"]);
    let fuzz_b = qmeas(&["fuzz", "--n", "3", "--seed", "5", "--max-dim", "3"]);
    assert_eq!(fuzz_a.stdout, fuzz_b.stdout);
}
