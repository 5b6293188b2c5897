//! Behavioral tests of the `kerrcat` binary: output schemas, exit codes and
//! reproducibility.

use std::process::{Command, Output};

fn kerrcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrcat"))
        .args(args)
        .env_remove("KERRCAT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn coefficients_five_components() {
    let doc = stdout_json(&kerrcat(&["coefficients", "--n", "5", "--alpha", "1"]));
    let coeffs = doc["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 5);
    for c in coeffs {
        let modulus = c["modulus"].as_f64().unwrap();
        assert!((modulus - 0.447_213_6).abs() < 1e-7);
    }
    assert_eq!(doc["amplitudes"].as_array().unwrap().len(), 5);
}

#[test]
fn coefficients_single_component() {
    let doc = stdout_json(&kerrcat(&["coefficients", "--n", "1", "--alpha", "1"]));
    let coeffs = doc["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 1);
    assert!((coeffs[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!(coeffs[0]["im"].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn coefficients_two_components() {
    let doc = stdout_json(&kerrcat(&["coefficients", "--n", "2", "--alpha", "1"]));
    let coeffs = doc["coefficients"].as_array().unwrap();
    assert!((coeffs[0]["re"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((coeffs[0]["im"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((coeffs[1]["re"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((coeffs[1]["im"].as_f64().unwrap() + 0.5).abs() < 1e-15);
}

#[test]
fn condition_reports_headline_ratios() {
    let doc = stdout_json(&kerrcat(&[
        "condition", "--n", "5", "--alpha", "7.23", "--target", "3,4",
    ]));
    let d = doc["d"].as_array().unwrap();
    assert_eq!(d.len(), 10);
    // sorted by modulus, so the target pair leads
    assert_eq!(d[0]["k"], 3);
    assert_eq!(d[0]["l"], 4);
    assert_eq!(d[1]["k"], 4);
    assert_eq!(d[1]["l"], 5);
    let r45 = d[1]["ratio_to_target"].as_f64().unwrap();
    assert!(r45 > 0.6e-4 && r45 < 2.4e-4, "r45 = {r45}");
    assert!(doc["fidelity_to_target"].as_f64().unwrap() > 0.999);
}

#[test]
fn condition_rejects_invalid_target() {
    let out = kerrcat(&["condition", "--n", "1", "--alpha", "1", "--target", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn condition_far_outcome_exits_degenerate() {
    let out = kerrcat(&[
        "condition", "--n", "5", "--alpha", "1", "--target", "3,4", "--xm", "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn scan_single_row() {
    let out = kerrcat(&[
        "scan", "--n", "5", "--target", "3,4", "--from", "5", "--to", "5", "--steps", "1",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("alpha"))
        .collect();
    assert_eq!(data_rows.len(), 1);
    assert!(data_rows[0].starts_with("5,"));
}

#[test]
fn scan_rejects_bad_range() {
    let out = kerrcat(&[
        "scan", "--n", "5", "--target", "3,4", "--from", "9", "--to", "5", "--steps", "11",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_reports_zero_near_reference() {
    let out = kerrcat(&[
        "scan", "--n", "5", "--target", "3,4", "--from", "6.8", "--to", "7.6", "--steps", "801",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let zeros: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("# zero,"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!zeros.is_empty());
    let near: Vec<&f64> = zeros.iter().filter(|z| (**z - 7.23).abs() < 0.15).collect();
    assert_eq!(near.len(), 1, "zeros: {zeros:?}");
}

#[test]
fn wigner_vacuum_peak() {
    let doc = stdout_json(&kerrcat(&[
        "wigner", "--n", "1", "--alpha", "1", "--state", "vacuum", "--resolution", "65",
    ]));
    let max = doc["max"].as_f64().unwrap();
    assert!((max - 1.0 / std::f64::consts::PI).abs() < 1e-9);
    assert_eq!(doc["values"].as_array().unwrap().len(), 65 * 65);
}

#[test]
fn wigner_conditioned_is_symmetric_csv() {
    let out = kerrcat(&[
        "wigner", "--n", "5", "--alpha", "2", "--target", "3,4", "--resolution", "65",
        "--format", "csv",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0].len(), 65);
    for i in 0..65 {
        for j in 0..65 {
            assert!((rows[i][j] - rows[64 - i][64 - j]).abs() < 1e-9);
        }
    }
}

#[test]
fn wigner_undersized_grid_exits_coverage() {
    let out = kerrcat(&[
        "wigner", "--n", "5", "--alpha", "3", "--target", "3,4", "--grid", "-1,1,-1,1",
        "--resolution", "32",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sample_rejects_zero_count() {
    let out = kerrcat(&[
        "sample", "--n", "5", "--alpha", "3", "--target", "3,4", "--seed", "1", "--count", "0",
        "--window", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_vacuum_fixture_statistics() {
    let doc = stdout_json(&kerrcat(&[
        "sample", "--n", "1", "--alpha", "1", "--state", "vacuum", "--seed", "9", "--count",
        "100000", "--window", "0.5",
    ]));
    let mean = doc["mean"].as_f64().unwrap();
    let sigma_mean = (0.5f64 / 100000.0).sqrt();
    assert!(mean.abs() < 5.0 * sigma_mean, "mean = {mean}");
    let variance = doc["variance"].as_f64().unwrap();
    assert!((variance - 0.5).abs() < 0.02);
}

#[test]
fn sample_success_fraction_matches_window_quadrature() {
    let doc = stdout_json(&kerrcat(&[
        "sample", "--n", "5", "--alpha", "7.23", "--target", "3,4", "--seed", "3", "--count",
        "50000", "--window", "0.1",
    ]));
    let p = doc["window_probability"].as_f64().unwrap();
    let f = doc["success_fraction"].as_f64().unwrap();
    let sigma = (p * (1.0 - p) / 50000.0).sqrt();
    assert!((f - p).abs() < 3.0 * sigma, "fraction {f} vs probability {p}");
}

#[test]
fn invalid_thread_env_exits_config() {
    let out = Command::new(env!("CARGO_BIN_EXE_kerrcat"))
        .args(["coefficients", "--n", "3", "--alpha", "1"])
        .env("KERRCAT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_numbers_roundtrip_exactly() {
    let out = kerrcat(&["condition", "--n", "5", "--alpha", "7.23", "--target", "3,4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string(&doc).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&again).unwrap();
    fn collect(v: &serde_json::Value, out: &mut Vec<f64>) {
        match v {
            serde_json::Value::Number(n) => out.push(n.as_f64().unwrap()),
            serde_json::Value::Array(a) => a.iter().for_each(|v| collect(v, out)),
            serde_json::Value::Object(o) => o.values().for_each(|v| collect(v, out)),
            _ => {}
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    collect(&doc, &mut a);
    collect(&reparsed, &mut b);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}
