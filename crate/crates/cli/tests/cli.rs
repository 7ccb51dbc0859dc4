use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn koopman(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koopman"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn decompose_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["decompose"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("raw 126 / canonical 42"));
    let terms = read_csv(&dir.path().join("terms.csv"));
    assert_eq!(terms.len(), 42);
    assert_eq!(terms[0][0], "1");
    let total: u64 = terms.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 126);
    assert_eq!(read_csv(&dir.path().join("spectrum.csv")).len(), 42);
}

#[test]
fn decompose_single_level() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["decompose", "--L", "0", "--W", "2", "--format", "json"], dir.path());
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("terms.json")).unwrap()).unwrap();
    let terms = json["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[1]["index"], serde_json::json!([2]));
    assert_eq!(json["config"]["max_wavenumber"], 2);
}

#[test]
fn zero_file_datum_has_vanishing_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let u0 = dir.path().join("u0.csv");
    fs::write(&u0, "u\n".to_string() + &"0\n".repeat(257)).unwrap();
    let spec = format!("file:{}", u0.display());
    let o = koopman(&["decompose", "--ic", &spec, "--L", "2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for row in read_csv(&dir.path().join("terms.csv")) {
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-15);
    }
}

#[test]
fn reconstruct_reports_errors_and_t0_note() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["reconstruct", "--t", "0,0.06"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let line0 = text.lines().find(|l| l.starts_with("t = 0:")).unwrap();
    assert!(line0.contains("non-convergent at t = 0"));
    let rows = read_csv(&dir.path().join("reconstruct.csv"));
    assert_eq!(rows.len(), 1024);
    let max_err = |col: usize| rows.iter().map(|r| r[col].parse::<f64>().unwrap().abs()).fold(0.0, f64::max);
    assert!(max_err(3) > 0.1);
    assert!(max_err(6) < 1e-2);
}

#[test]
fn empty_time_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["reconstruct", "--t", ""], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn relevance_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["relevance", "--t1", "0.12", "--t2", "0.24"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("2 terms with sigma > 0.05"));
    let rows = read_csv(&dir.path().join("relevance.csv"));
    assert_eq!(rows.len(), 42);
    assert_eq!(rows[0][0], "1");

    let o = koopman(&["relevance", "--threshold", "1.1"], dir.path());
    assert!(stdout(&o).starts_with("0 terms with sigma > 1.1"));
}

#[test]
fn dmd_defaults_and_linear_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = koopman(&["dmd"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("rank_used 15 / 1 eigenvalue(s) within 1% of -pi^2"));
    assert_eq!(read_csv(&dir.path().join("dmd_eigenvalues.csv")).len(), 15);
    assert_eq!(read_csv(&dir.path().join("dmd_error.csv")).len(), 101);
    assert_eq!(read_csv(&dir.path().join("snapshots.csv")).len(), 1022);

    let lin = tempfile::tempdir().unwrap();
    let o = koopman(&["dmd", "--ic", "linear", "--format", "json"], lin.path());
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(lin.path().join("dmd.json")).unwrap()).unwrap();
    assert_eq!(json["dmd"]["rank_used"], 1);
    let lambda = json["dmd"]["eigenvalues_continuous"][0][0].as_f64().unwrap();
    assert!((lambda + PI * PI).abs() < 1e-4);
}

#[test]
fn validate_tables() {
    let dir = tempfile::tempdir().unwrap();
    for ic in ["zero", "sin:0.1"] {
        let o = koopman(&["validate", "--ic", ic, "--draws", "20"], dir.path());
        assert!(o.status.success());
        let rows = read_csv(&dir.path().join("validate.csv"));
        assert!(rows.iter().all(|r| r[2] == "true"), "{ic}: {rows:?}");
    }
    let o = koopman(&["validate", "--draws", "5"], dir.path());
    assert!(o.status.success());
    let rows = read_csv(&dir.path().join("validate.csv"));
    let member = rows.iter().find(|r| r[0] == "omega_b_member").unwrap();
    assert_eq!(member[2], "false");
}

#[test]
fn strict_mode_and_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(koopman(&["decompose", "--strict"], dir.path()).status.code(), Some(3));
    assert_eq!(
        koopman(&["decompose", "--strict", "--ic", "sin:0.1"], dir.path()).status.code(),
        Some(0)
    );
    assert_eq!(koopman(&["decompose", "--ic", "tan:1"], dir.path()).status.code(), Some(2));
    assert_eq!(koopman(&["decompose", "--mesh", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(koopman(&["decompose", "--ic", "linear"], dir.path()).status.code(), Some(2));
    assert_eq!(koopman(&["decompose", "--bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(koopman(&["decompose", "--format", "json"], dir.path()).status.success());
        assert!(koopman(&["reconstruct", "--t", "0.02,0.1"], dir.path()).status.success());
    }
    for name in ["terms.json", "spectrum.csv", "reconstruct.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}
