use std::path::Path;
use std::process::{Command, Output};

fn fvk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvk")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV with a `#` preamble: header first.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut reader = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_reader(text.as_bytes());
    reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn relaxed_from_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("base.cfg"), "h=1e-2\nbeta=1\nalpha_s=1e-4\n").unwrap();
    let out = fvk(dir.path(), &["relaxed", "--config", "base.cfg", "--h", "1e-4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/relaxed.csv")).unwrap();
    assert!(text.starts_with("# manifest="));
    assert!(text.contains("# h=1e-4\n"));
    let rows = csv_rows(&dir.path().join("out/relaxed.csv"));
    assert_eq!(rows[0], ["r", "u0", "sigma0"]);
    assert!(rows.len() > 10);
    for row in &rows[1..] {
        let sigma: f64 = row[2].parse().unwrap();
        assert!(sigma >= -1e-12);
    }
    let summary = read_json(&dir.path().join("out/relaxed.json"));
    assert!((summary["p"].as_f64().unwrap() - 1e-4).abs() < 1e-12);
    let manifest = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(manifest["hash"], summary["manifest"]);
}

#[test]
fn inadmissible_substrate_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["relaxed", "--beta", "2", "--alpha-s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn bad_decades_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["sweep", "--mode", "f0-scaling", "--h-decades", "1e-6:oops"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn f0_sweep_has_half_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["sweep", "--mode", "f0-scaling", "--beta", "1", "--h-decades", "1e-6:1e-2:8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("out/sweep.json"));
    let slope = report["slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 0.02, "slope {slope}");
    assert_eq!(report["points"].as_array().unwrap().len(), 8);
    let svg = std::fs::read_to_string(dir.path().join("out/sweep.svg")).unwrap();
    assert!(svg.starts_with("<!-- manifest=") && svg.contains("<svg"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["lemma-check", "--alpha-s", "1e-2", "--count", "20", "--seed", "7"];
    let a = fvk(dir.path(), &[&args[..], &["--out", "a"]].concat());
    let b = fvk(dir.path(), &[&args[..], &["--out", "b", "--jobs", "2"]].concat());
    assert!(a.status.success() && b.status.success());
    for name in ["lemma.csv", "lemma.json"] {
        let x = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let summary = read_json(&dir.path().join("a/lemma.json"));
    for result in summary["results"].as_array().unwrap() {
        assert_eq!(result["violations"], 0);
        assert_eq!(result["checked"], 20);
    }
}

#[test]
fn report_rerenders_saved_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["sweep", "--mode", "f0-scaling", "--h-decades", "1e-6:1e-3:6", "--out", "s"]);
    assert!(out.status.success());
    let out = fvk(dir.path(), &["report", "--input", "s/sweep.json", "--model", "power-times-log", "--out", "r"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let saved = read_json(&dir.path().join("s/sweep.json"));
    let redone = read_json(&dir.path().join("r/report.json"));
    assert_eq!(saved["points"], redone["points"]);
    assert_eq!(redone["model"], "power-times-log");
    assert!(dir.path().join("r/report.svg").exists());
    assert!(dir.path().join("r/report.csv").exists());
}

#[test]
fn construct_writes_energy_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["construct", "--h", "1e-6", "--radii", "8", "--theta-samples", "16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("out/construct.json"));
    let energy = &summary["energy"];
    let total = energy["total"].as_f64().unwrap();
    assert!(energy["r3"].as_f64().unwrap() <= 1e-10 * total);
    assert!(summary["excess"].is_object() || summary["excess"].is_number());
    let rows = csv_rows(&dir.path().join("out/construct.csv"));
    assert_eq!(rows[0], ["r", "theta", "xi"]);
    assert_eq!(rows.len(), 1 + 8 * 16);
}

#[test]
fn minimize_reaches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = fvk(dir.path(), &["minimize", "--functional", "f0", "--h", "1e-4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("out/minimize.json"));
    assert!(summary["min_sigma"].as_f64().unwrap() >= -1e-8);
    assert!(summary["gap_to_u0"].as_f64().unwrap().abs() <= 1e-6);
}
