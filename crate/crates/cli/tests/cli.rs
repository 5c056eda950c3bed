use std::path::Path;
use std::process::{Command, Output};

fn polargap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polargap"))
        .args(args)
        .env_remove("POLARGAP_TOL_SCALE")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn lattice_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lattice.json");
    let o = polargap(&["lattice", "--e1", "1", "--e2", "0", "--e3", "-1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    let omega: f64 = v["omega"].to_string().parse().unwrap();
    assert!((omega - 1.3110287771460599).abs() < 1e-15);
    // 17 significant digits
    assert_eq!(v["g2"].to_string(), "4.0000000000000000e+0");
}

#[test]
fn sample_r3_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r3.csv");
    let o = polargap(&["density", "sample", "--family", "onegap", "--branch", "3", "--n", "41", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,r,y"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 41);
    let min = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!((min - 0.75).abs() < 1e-10 && (max - 1.5).abs() < 1e-10);
    // last x is one period, reached at y = 2|omega'|
    let last = rows.last().unwrap();
    assert!((last[2] - 2.6220575542921196).abs() < 1e-9);
}

#[test]
fn soliton_sample_is_symmetric() {
    let o = polargap(&["density", "sample", "--family", "soliton", "--x-min", "-3", "--x-max", "3", "--n", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[3][1].abs() < 1e-12);
    for k in 0..3 {
        assert!((rows[k][1] - rows[6 - k][1]).abs() < 1e-9);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["density", "gen", "--family", "twogap-alpha", "--branch", "1", "--n", "50", "--format", "json"];
    let a = polargap(&args);
    let b = polargap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn discontinuous_density_refuses_x_sampling() {
    let o = polargap(&["density", "sample", "--family", "onegap", "--branch", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sample it in y"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(polargap(&["lattice", "--e1", "0", "--e2", "1", "--e3", "-1"]).status.code(), Some(2));
    assert_eq!(polargap(&["density", "period", "--family", "twogap-pm", "--branch", "2"]).status.code(), Some(2));
    assert_eq!(polargap(&["density", "gen", "--family", "onegap", "--n", "1"]).status.code(), Some(2));
    assert_eq!(polargap(&["density", "sample", "--family", "onegap", "--x-min", "2", "--x-max", "1"]).status.code(), Some(2));
    assert_eq!(polargap(&["density", "period", "--family", "onegap", "--branch", "2"]).status.code(), Some(2));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_polargap"))
        .args(["lattice"])
        .env("POLARGAP_TOL_SCALE", "abc")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn verify_report_schema_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = polargap(&["verify", "--no-spectral", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["config"]["roots"].is_object());
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 40);
    for c in checks {
        for key in ["name", "paper_ref", "measured", "expected", "tol", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }

    let bad = polargap(&["verify", "--no-spectral", "--perturb-a3", "1.01"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL onegap.r3.x_derivative")));
}

#[test]
fn tolerance_scale_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_polargap"))
        .args(["verify", "--no-spectral", "--out", out.to_str().unwrap()])
        .env("POLARGAP_TOL_SCALE", "10")
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    let tol: f64 = v["config"]["tolerances"]["derivative"].to_string().parse().unwrap();
    assert!((tol - 1e-7).abs() < 1e-20);
}

#[test]
fn spectrum_and_backlund_commands() {
    let o = polargap(&["spectrum", "--family", "onegap", "--branch", "3", "--operator", "string-in-y"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));

    let o = polargap(&["spectrum", "--family", "onegap-cusp", "--branch", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = polargap(&["backlund", "--family", "onegap", "--branch", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let b: f64 = text.lines().find(|l| l.starts_with("b ")).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((b - 1.125).abs() < 1e-9);

    let o = polargap(&["limit", "soliton", "--deltas", "0.1,0.01,0.001"]);
    assert!(o.status.success());
}
