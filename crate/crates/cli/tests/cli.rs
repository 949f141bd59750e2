use std::path::Path;
use std::process::{Command, Output};

fn techknee(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_techknee"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TECHKNEE_DATA")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn audio_case_headline() {
    let dir = tempfile::tempdir().unwrap();
    let out = techknee(&["case", "audio"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("crossover: 1998, knee(1%): 1999\n"));
    assert!(stdout(&out).contains("bundled tables"));
}

#[test]
fn video_case_and_variants() {
    let dir = tempfile::tempdir().unwrap();
    assert!(stdout(&techknee(&["case", "video"], dir.path())).starts_with("crossover: 2002, knee(1%): 2001"));
    assert!(stdout(&techknee(&["case", "audio", "--scenario", "song"], dir.path())).starts_with("crossover: 1992,"));
    let bad = techknee(&["case", "audio", "--scenario", "nope"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn flat_series_has_zero_tir() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "flat.csv", "year,value\n2000,3\n2001,3\n2002,3\n2003,3\n");
    let out = techknee(&["fit", "--input", "flat.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("TIR: 0.0% per year"));
    assert!(stdout(&out).contains("source: flat.csv"));
}

#[test]
fn json_mirror_is_parseable() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.csv", "year,value\n2000,1\n2001,2\n2002,4\n");
    let out = techknee(&["--json", "fit", "--input", "s.csv"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "fit");
    assert!((v["tir_percent"].as_f64().unwrap() - 100.0).abs() < 1e-9);
    let case: serde_json::Value = serde_json::from_slice(&techknee(&["case", "audio", "--json"], dir.path()).stdout).unwrap();
    assert_eq!(case["result"]["crossover"]["year"], 1998);
}

#[test]
fn crossover_and_require_flag() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "r.csv", "year,value\n2000,1\n2001,2\n2002,4\n2003,8\n");
    write(dir.path(), "t.csv", "year,value\n2000,3\n2001,3\n2002,3\n2003,3\n");
    write(dir.path(), "low.csv", "year,value\n2000,0.1\n2001,0.1\n2002,0.1\n2003,0.1\n");
    let out = techknee(&["crossover", "--replacement", "r.csv", "--target", "t.csv"], dir.path());
    assert!(stdout(&out).contains("crossover: 2002"));
    let fitted = techknee(&["crossover", "--replacement", "r.csv", "--target", "t.csv", "--fitted"], dir.path());
    assert!(stdout(&fitted).contains("crossover: 2002 (fitted curves meet at 2001.585)"));

    let none = techknee(&["crossover", "--replacement", "low.csv", "--target", "t.csv"], dir.path());
    assert_eq!(none.status.code(), Some(0));
    let required =
        techknee(&["crossover", "--replacement", "low.csv", "--target", "t.csv", "--require-crossover"], dir.path());
    assert_eq!(required.status.code(), Some(1));
}

#[test]
fn knee_command() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "share.csv", "year,value\n2000,0.001\n2001,0.02\n2002,0.2\n");
    let out = techknee(&["knee", "--input", "share.csv", "--threshold", "0.1"], dir.path());
    assert_eq!(stdout(&out), "source: share.csv\nknee(10%): 2002\n");
    let bad = techknee(&["knee", "--input", "share.csv", "--threshold", "2"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(techknee(&["fit", "--input", "missing.csv"], dir.path()).status.code(), Some(2));
    assert_eq!(techknee(&["fit", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(techknee(&["fit", "--input", "x.csv", "--unit", "furlongs"], dir.path()).status.code(), Some(2));
    let missing = techknee(&["fit", "--input", "missing.csv"], dir.path());
    let err = String::from_utf8(missing.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn malformed_input_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dup.csv", "year,value\n2000,1\n2000,2\n");
    let out = techknee(&["fit", "--input", "dup.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("dup.csv:3"));
}

#[test]
fn reproduce_writes_report_and_strict_reflects_cells() {
    let dir = tempfile::tempdir().unwrap();
    let lax = techknee(&["reproduce", "--out", "rep"], dir.path());
    assert_eq!(lax.status.code(), Some(0));
    let text = stdout(&lax);
    assert!(text.contains("unsupported: no cost model for this target"));
    for file in ["cells.csv", "results.csv", "ranges.json", "report.json", "fig3_curves.csv", "fig3_curves.svg"] {
        assert!(dir.path().join("rep").join(file).exists(), "{file}");
    }
    let curves = std::fs::read_to_string(dir.path().join("rep/fig3_curves.csv")).unwrap();
    assert!(curves.starts_with("year,series,value,unit\n"));

    let any_fail = text.lines().any(|l| l.ends_with("FAIL") || l.contains(" FAIL ("));
    let strict = techknee(&["reproduce", "--strict"], dir.path());
    assert_eq!(strict.status.code(), Some(if any_fail { 1 } else { 0 }));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = techknee(&["reproduce", "--json", "--out", "a"], dir.path());
    let b = techknee(&["reproduce", "--json", "--out", "b"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    for file in ["report.json", "fig3_curves.svg", "results.csv"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(file)).unwrap(),
            std::fs::read(dir.path().join("b").join(file)).unwrap()
        );
    }
}

#[test]
fn sweep_with_custom_drive_target() {
    let dir = tempfile::tempdir().unwrap();
    let cost: String = std::iter::once("year,value\n".to_string())
        .chain((1983..=2015).map(|y| format!("{y},{}\n", 20.0 - f64::from(y - 1983) * 0.3)))
        .collect();
    write(dir.path(), "drive.csv", &cost);
    write(
        dir.path(),
        "sweep.json",
        r#"{
            "case": "audio",
            "targets": ["mail_cd", "drive_cd"],
            "reference_media": ["album", "song"],
            "usage_metrics": ["minutes"],
            "detection": ["empirical", {"fitted": {}}],
            "knee_thresholds": [0.01, 0.1],
            "custom_series": {"drive_cd": {"path": "drive.csv", "unit": "real-dollars"}}
        }"#,
    );
    let out = techknee(&["sweep", "--config", "sweep.json", "--out", "sw"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("scenarios: 16\n"));
    let rows = std::fs::read_to_string(dir.path().join("sw/results.csv")).unwrap();
    assert_eq!(rows.lines().count(), 17);
    let ranges: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sw/ranges.json")).unwrap()).unwrap();
    assert_eq!(ranges[0]["axis"], "case");
}

#[test]
fn sweep_rejects_unresolved_names() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "sweep.json",
        r#"{"case": "audio", "targets": ["mail_lp"], "reference_media": ["album"],
            "usage_metrics": ["minutes"], "detection": ["empirical"], "knee_thresholds": [0.01]}"#,
    );
    let out = techknee(&["sweep", "--config", "sweep.json", "--out", "sw"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(techknee(&["sweep", "--config", "nope.json", "--out", "sw"], dir.path()).status.code(), Some(2));
}

#[test]
fn export_data_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = techknee(&["export-data", "--out", "data"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 16);

    let tampered = dir.path().join("data/a4_traffic.csv");
    let text = std::fs::read_to_string(&tampered).unwrap().replacen("180", "181", 1);
    std::fs::write(&tampered, text).unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_techknee"))
        .args(["case", "audio"])
        .env("TECHKNEE_DATA", dir.path().join("data"))
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8(run.stderr).unwrap().contains("checksum"));
}
