use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, mode: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{mode}.json"));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_dynsamp"))
        .arg(mode)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn roundtrip_writes_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "roundtrip",
        r#"{"filter":{"kind":"heat","t":0.5},"m":3,"n":3,"omega":[1],"L":72,"trials":2,"seed":3}"#,
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert!(report.is_object());
    let table = std::fs::read_to_string(dir.path().join("out/table.csv")).unwrap();
    assert!(table.lines().count() >= 2);
}

#[test]
fn invalid_hypothesis_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "roundtrip",
        r#"{"filter":{"kind":"heat","t":0.5},"m":3,"n":4,"omega":[1],"L":72,"seed":3}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    let violations = err["violations"].as_array().unwrap();
    assert!(violations
        .iter()
        .any(|v| v.as_str().unwrap().contains("n is odd")));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "singular_scan",
        r#"{"m":3,"L":9,"bogus":1}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].is_string());
}

#[test]
fn forced_rank_deficient_solve_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "roundtrip",
        r#"{"filter":{"kind":"heat","t":0.5},"m":3,"n":3,"omega":[],"L":72,"seed":3,"force":true}"#,
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stderr_json(&out)["error"], "rank_deficient");
}

#[test]
fn overrides_replace_config_values_and_spectrum_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "singular_scan",
        r#"{"filter":{"kind":"raised_cosine","p":1.0},"m":3,"L":10,"spectrum":true}"#,
        &["--L", "60"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let spectrum = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 20);
}
