use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alphastep::{choose_start, run, Polynomial, RunConfig};
use serde_json::Value;
use tempfile::TempDir;

const Z2: &str = r#"{"degree":2,"roots":[[0.5,0],[-0.5,0]]}"#;
const Z3: &str = r#"{"degree":3,"roots":[[0,0],[0.9,0],[-0.9,0]]}"#;
const LINEAR: &str = r#"{"degree":1,"roots":[[0.3,0]]}"#;

fn alphastep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alphastep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_poly(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_linear_certifies_immediately() {
    let out = alphastep(&["solve", "--poly", LINEAR, "--t", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["N"], 0);
    assert_eq!(v["outcome"], "certified");
}

#[test]
fn solve_matches_library_run_and_writes_trace() {
    let dir = TempDir::new().unwrap();
    let poly = write_poly(&dir, "z2.json", Z2);
    let trace_path = dir.path().join("trace.jsonl");
    let out = alphastep(&["solve", "--poly", s(&poly), "--t", "0", "--out", s(&trace_path)]);
    assert_eq!(code(&out), 0);

    let p = Polynomial::from_json_str(Z2).unwrap();
    let cfg = RunConfig::default();
    let trace = run(&p, choose_start(2, 0.0, 1.0), &cfg).unwrap();
    assert_eq!(json(&out)["N"], trace.step_count());
    assert_eq!(fs::read_to_string(&trace_path).unwrap(), trace.to_jsonl());
}

#[test]
fn solve_is_byte_identical_across_invocations() {
    let args = ["solve", "--poly", Z3, "--t", "0.3", "--format", "jsonl"];
    let a = alphastep(&args);
    let b = alphastep(&args);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn forced_cutoff_exits_3() {
    let out = alphastep(&["solve", "--poly", Z2, "--t", "0", "--max-steps", "1", "--threshold", "1e-12"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["outcome"], "max_steps_exceeded");
}

#[test]
fn start_on_a_root_exits_4() {
    // |z0| = 1 + C/d = 1.5 at t = 0 is a root
    let out = alphastep(&["solve", "--poly", r#"{"degree":2,"roots":[[1.5,0],[-1.5,0]]}"#]);
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let corrupt = write_poly(&dir, "bad.json", "{\"degree\": 2, \"roots\": [[0.5");
    let missing = dir.path().join("missing.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--poly", r#"{"degree":2,"coeffs":[[1,0],[0,0],[2,0]]}"#],
        vec!["solve", "--poly", s(&corrupt)],
        vec!["solve", "--poly", s(&missing)],
        vec!["solve", "--poly", Z2, "--t", "1.5"],
        vec!["solve", "--poly", Z2, "--threshold", "0.5"],
        vec!["sweep", "--poly", s(&corrupt)],
        vec!["sweep", "--poly", Z2, "--M", "4"],
        vec!["certify", "--poly", Z2, "--z", "a,b"],
        vec!["plot", "--poly", s(&corrupt)],
        vec!["verify", "--only", "no-such-check"],
    ];
    for args in cases {
        assert_eq!(code(&alphastep(&args)), 2, "{args:?}");
    }
}

#[test]
fn certify_accepts_near_root_and_rejects_far_point() {
    let near = alphastep(&["certify", "--poly", Z2, "--z", "0.51,0.01"]);
    assert_eq!(code(&near), 0);
    let v = json(&near);
    assert_eq!(v["certified"], true);
    assert_eq!(v["contraction"]["holds"], true);

    let far = alphastep(&["certify", "--poly", Z2, "--z", "-1.5,0"]);
    assert_eq!(code(&far), 6);
    assert_eq!(json(&far)["certified"], false);
}

#[test]
fn sweep_writes_csv_and_checks_bound() {
    let dir = TempDir::new().unwrap();
    let poly = write_poly(&dir, "z2.json", Z2);
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let out = alphastep(&["sweep", "--poly", s(&poly), "--M", "64", "--out", s(&csv_a)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["mean_cost"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
    let text = fs::read_to_string(&csv_a).unwrap();
    assert!(text.starts_with("t,N,outcome,beta_plus,wN_ratio\n"));
    assert_eq!(text.lines().count(), 65);

    alphastep(&["sweep", "--poly", s(&poly), "--M", "64", "--out", s(&csv_b)]);
    assert_eq!(fs::read(&csv_a).unwrap(), fs::read(&csv_b).unwrap());
}

#[test]
fn sweep_of_linear_has_zero_mean() {
    let out = alphastep(&["sweep", "--poly", LINEAR]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["mean_cost"], 0.0);
}

#[test]
fn sweep_far_outside_fixed_circle_exceeds_bound() {
    let out = alphastep(&["sweep", "--poly", Z2, "--C", "1e100", "--M", "16"]);
    assert_eq!(code(&out), 5);
    assert_eq!(json(&out)["within_bound"], false);
}

#[test]
fn profile_reports_critical_structure() {
    let out = alphastep(&["profile", "--poly", Z3]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["critical"].as_array().unwrap().len(), 2);
    let rho = v["rho"]["1"].as_f64().unwrap();
    // 0.54·sqrt(0.27), the modulus of both critical values
    assert!((rho - 0.54 * 0.27f64.sqrt()).abs() < 1e-12);
}

#[test]
fn verify_report_only_check_always_passes() {
    let out = alphastep(&["verify", "--only", "lemma6.8", "--d-max", "2"]);
    assert_eq!(code(&out), 0);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("INFO") && table.contains("lemma6.8"));
}

#[test]
fn verify_small_subset_passes() {
    let out = alphastep(&["verify", "--d-max", "4", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["checks"].as_array().unwrap().len(), 14);
}

#[test]
fn trace_plot_has_one_marker_per_iterate() {
    let solved = json(&alphastep(&["solve", "--poly", Z2, "--t", "0"]));
    let n = solved["N"].as_u64().unwrap() as usize;
    let svg = String::from_utf8(alphastep(&["plot", "--poly", Z2, "--t", "0"]).stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="step""#).count(), n + 1);

    let svg1 = String::from_utf8(alphastep(&["plot", "--poly", LINEAR]).stdout).unwrap();
    assert_eq!(svg1.matches(r#"class="step""#).count(), 1);
}

#[test]
fn voronoi_shading_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for path in [&a, &b] {
        let out = alphastep(&["plot", "--poly", Z3, "--kind", "voronoi", "--out", s(path)]);
        assert_eq!(code(&out), 0);
    }
    let svg = fs::read_to_string(&a).unwrap();
    assert_eq!(svg.as_bytes(), fs::read(&b).unwrap().as_slice());
    assert!(svg.contains(r#"data-grid="200""#));
    let shading = &svg[..svg.find("</g>").unwrap()];
    let colors: std::collections::BTreeSet<&str> = shading
        .split("fill=\"")
        .skip(1)
        .map(|rest| &rest[..rest.find('"').unwrap()])
        .collect();
    // one color per distinct critical value
    assert!(colors.len() >= 2, "{colors:?}");
}
