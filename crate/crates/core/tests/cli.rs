use std::path::Path;
use std::process::{Command, Output};

use helfrich::export::csv::parse_profile;

fn helfrich(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helfrich"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const REFERENCE: [&str; 6] = ["--c0", "1", "--lambda", "0.25", "--p", "1"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn solve_reference_writes_profile_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&with(&["solve"], &with(&REFERENCE, &["--w0p", "0.05"])), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,z,w,kappa_m,kappa_l,H,K");
    let rows = parse_profile(&csv).unwrap();
    assert!(rows.len() > 100);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["classification"]["kind"], "Biconcave");
    for key in ["params", "config", "landmarks", "totals", "elResidual", "equatorIdentityResidual", "boundsReport"] {
        assert!(!json[key].is_null(), "missing {key}");
    }
}

#[test]
fn negative_slope_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&with(&["solve"], &with(&REFERENCE, &["--w0p", "-1"])), dir.path());
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--w0p"));
    let o = helfrich(&["solve", "--w0p", "abc"], dir.path());
    assert_eq!(code(&o), 64);
    let o = helfrich(&["solve", "--nonsense", "1"], dir.path());
    assert_eq!(code(&o), 64);
}

#[test]
fn blow_up_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--c0", "5", "--lambda", "0", "--p", "0.1", "--w0p", "1"];
    let o = helfrich(&with(&["solve"], &args), dir.path());
    assert_eq!(code(&o), 2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["classification"]["kind"], "BlowUpPositive");
    assert_eq!(code(&helfrich(&with(&["plot"], &args), dir.path())), 2);
    assert_eq!(code(&helfrich(&with(&["mesh"], &args), dir.path())), 2);
}

#[test]
fn verify_default_sweep_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&with(&["verify"], &REFERENCE), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bounds_report.json")).unwrap()).unwrap();
    assert_eq!(json["allPass"], true);
    assert_eq!(json["points"].as_array().unwrap().len(), 16);
}

#[test]
fn verify_lists_non_biconcave_points_as_excluded() {
    let dir = tempfile::tempdir().unwrap();
    // the largest slope blows up for these parameters, the smallest does not
    let args = ["--c0", "5", "--lambda", "0", "--p", "0.1", "--sweep-min", "1e-4", "--sweep-max", "1", "--sweep-points", "3"];
    let o = helfrich(&with(&["verify"], &args), dir.path());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bounds_report.json")).unwrap()).unwrap();
    let excluded = json["excluded"].as_array().unwrap();
    assert!(excluded.iter().any(|e| e["w0p"] == 1.0), "{json:#}");
    assert_eq!(code(&o), if json["allPass"] == true { 0 } else { 1 });
}

#[test]
fn zero_sweep_points_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&helfrich(&["verify", "--sweep-points", "0"], dir.path())), 64);
}

#[test]
fn sweep_grid_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--c0-range", "0:1:2", "--lambda-range", "0.25:0.5:2", "--p-range", "1", "--w0p-range", "0.01:0.05:3"];
    let o = helfrich(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "c0,lambda,p,w0p,classification,r_M,r0,wp_r0,r_inf,z_inf,roots_all_positive");
    assert_eq!(lines.len(), 13);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 11));
}

#[test]
fn sweep_with_negative_range_and_empty_fields() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--c0-range", "5", "--lambda-range", "-0.5:0:2", "--p-range", "0.1", "--w0p-range", "1"];
    let o = helfrich(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",,")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"c0": 5, "lambda": 0, "p": 0.1, "w0p": 1}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();
    // file alone: blow-up parameters
    assert_eq!(code(&helfrich(&["solve", "--config", cfg_s], dir.path())), 2);
    // flags override the file
    let o = helfrich(&with(&["solve", "--config", cfg_s], &with(&REFERENCE, &["--w0p", "0.05"])), dir.path());
    assert_eq!(code(&o), 0);
    std::fs::write(&cfg, r#"{"c0": 1, "unknown-key": 3}"#).unwrap();
    assert_eq!(code(&helfrich(&["solve", "--config", cfg_s], dir.path())), 64);
}

#[test]
fn output_dir_env_sets_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_helfrich"))
        .args(["solve", "--format", "json"])
        .env("OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn plot_from_csv_matches_plot_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = helfrich(&with(&["solve", "--format", "csv"], &with(&REFERENCE, &["--w0p", "0.05"])), &a);
    assert_eq!(code(&o), 0);
    let csv = a.join("profile.csv");
    let o = helfrich(&with(&["plot", "--input", csv.to_str().unwrap()], &with(&REFERENCE, &["--w0p", "0.05"])), &a);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(a.join("profile.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path d=\"M"));
}

#[test]
fn mesh_default_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&with(&["mesh"], &with(&REFERENCE, &["--w0p", "0.05"])), dir.path());
    assert_eq!(code(&o), 0);
    let obj = std::fs::read_to_string(dir.path().join("mesh.obj")).unwrap();
    let v = obj.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(v, 128 * (2 * 256 - 1) + 2);
    assert!(obj.lines().all(|l| l.starts_with("v ") || l.starts_with("f ")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = helfrich(&with(&["solve", "--format", "csv,json,svg,obj"], &with(&REFERENCE, &["--w0p", "0.05"])), d);
        assert_eq!(code(&o), 0);
        assert_eq!(code(&helfrich(&with(&["verify", "--sweep-points", "4"], &REFERENCE), d)), 0);
    }
    for f in ["profile.csv", "report.json", "profile.svg", "mesh.obj", "bounds_report.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}
