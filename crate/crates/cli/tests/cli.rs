use std::process::Command;

use qpsi_core::harness::{from_json, to_json, OrthogonalitySuiteReport, VerificationReport};

fn qpsi(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpsi"))
        .args(args)
        .env_remove("QPSI_PRECISION")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn verify_bilateral_theorem_passes() {
    let (code, out, _) = qpsi(&["verify", "--id", "thm_bns", "--count", "100", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("[PASS] thm_bns"));
}

#[test]
fn unknown_identity_is_a_usage_error() {
    let (code, out, err) = qpsi(&["verify", "--id", "nosuch"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("nosuch"));
}

#[test]
fn orthogonality_exact_window() {
    let (code, out, _) = qpsi(&["orthogonality", "--pair", "cor2", "--window", "0", "6", "--mode", "exact"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn malformed_arguments_are_usage_errors() {
    assert_eq!(qpsi(&["verify"]).0, 2);
    assert_eq!(qpsi(&["orthogonality", "--pair", "nosuch"]).0, 2);
    assert_eq!(qpsi(&["orthogonality", "--window", "5", "2"]).0, 2);
    assert_eq!(qpsi(&["verify", "--id", "1psi1", "--mode", "exact"]).0, 2);
    assert_eq!(qpsi(&["--precision", "30", "list"]).0, 2);
    assert_eq!(qpsi(&["bogus"]).0, 2);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qpsi"))
        .arg("list")
        .env("QPSI_PRECISION", "40")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_qpsi"))
        .arg("list")
        .env("QPSI_PRECISION", "15")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn list_names_every_identity() {
    let (code, out, _) = qpsi(&["list", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), qpsi_core::identity::registry().len());
    assert!(ids.contains(&"thm_bnsc"));
}

#[test]
fn json_report_round_trips_byte_for_byte() {
    for args in [
        &["verify", "--id", "thm_tns", "--count", "10", "--seed", "3", "--format", "json"][..],
        &["verify", "--id", "curious_qps", "--count", "3", "--n", "4", "--format", "json"][..],
    ] {
        let (code, out, _) = qpsi(args);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", out);
        let report: VerificationReport = from_json(&out).unwrap();
        assert_eq!(to_json(&report).unwrap() + "\n", out);
    }
    let (_, out, _) = qpsi(&["orthogonality", "--pair", "cor1", "--window", "0", "4", "--contexts", "3", "--format", "json"]);
    let report: OrthogonalitySuiteReport = from_json(&out).unwrap();
    assert_eq!(to_json(&report).unwrap() + "\n", out);
}

#[test]
fn output_file_and_failing_exit_code() {
    let dir = std::env::temp_dir().join(format!("qpsi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let (code, out, _) = qpsi(&[
        "verify",
        "--id",
        "qgauss",
        "--count",
        "5",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let report: VerificationReport = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.summary.samples, 5);
    std::fs::remove_dir_all(&dir).unwrap();

    // a tolerance below binary64 resolution cannot be met
    let (code, out, _) = qpsi(&["verify", "--id", "66s", "--count", "20", "--tol", "1e-30"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.starts_with("[FAIL]"));
}

#[test]
fn run_reports_help_on_stdout() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(qpsi_cli::run(["qpsi", "--help"], &mut out, &mut err), 0);
    assert!(String::from_utf8(out).unwrap().contains("verify-all"));
}
