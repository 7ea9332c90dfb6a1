use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_narain-os"))
}

fn bundled() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models/ii11_r1.3.model")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn check_all_passes_on_bundled_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["check", "all", "--model", bundled().to_str().unwrap(), "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    let reports = report["reports"].as_array().unwrap();
    let passes = reports.iter().filter(|r| r["verdict"] == "pass").count();
    assert!(passes >= 7, "{passes} passes");
    let names: Vec<&str> = reports.iter().map(|r| r["check"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("check,metric,value\n") && csv.lines().count() > 10);
    assert!(dir.path().join("report.meta.json").exists());
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let texts: Vec<String> = ["a.json", "b.json"]
        .iter()
        .map(|f| {
            let out = dir.path().join(f);
            let o = run(&["check", "all", "--model", bundled().to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn corr_of_vacuum_is_one() {
    let o = run(&["corr", "--model", bundled().to_str().unwrap(), "--insertions", "1", "--points", "0.4,0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[1], row[2]), ("1", "0"));
}

#[test]
fn corr_routes_agree() {
    let model = bundled();
    let args = ["corr", "--model", model.to_str().unwrap(), "--insertions", "e(1,0); e(-1,0)", "--points", "3,0.5; 0.1,0"];
    let value = |extra: &[&str]| -> f64 {
        let o = bin().args(args).args(extra).output().unwrap();
        String::from_utf8(o.stdout).unwrap().lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap()
    };
    let (a, b) = (value(&["--cutoff", "10"]), value(&["--closed-form"]));
    assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
}

#[test]
fn non_even_gram_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("odd.model");
    std::fs::write(&path, "gram = 1 0 0 1\nboost_R = 1\n").unwrap();
    let o = run(&["model", "validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotEven"));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = run(&[
        "check",
        "ward_identities",
        "--model",
        bundled().to_str().unwrap(),
        "--tol",
        "ward_identities=1e-30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["check"], "ward_identities");
}

#[test]
fn unknown_tolerance_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = run(&["check", "all", "--model", bundled().to_str().unwrap(), "--tol", "bogus=1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}
