use std::process::{Command, Output};

use serde_json::Value;

fn dunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = dunkl(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn malformed_requests_exit_with_two() {
    assert_eq!(dunkl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dunkl(&["constants", "--rs", "e8:k=1"]).status.code(), Some(2));
    assert_eq!(dunkl(&["quad", "--rs", "a1:k=1", "--domain", "ball:"]).status.code(), Some(2));
    assert_eq!(dunkl(&["quad", "--rs", "a1:k=1", "--field", "nonsense"]).status.code(), Some(2));
    assert_eq!(dunkl(&["verify", "--rs", "a1:k=1", "--suite", "NOT_A_CHECK"]).status.code(), Some(2));
}

#[test]
fn constants_report_closed_forms() {
    let out = dunkl(&["constants", "--rs", "a1:k=1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["macdonald_mehta"].as_f64().unwrap() - 5.01325654926200100).abs() < 1e-13);
    assert_eq!(v["effective_dimension"].as_f64(), Some(3.0));

    let csv = dunkl(&["constants", "--rs", "a1:k=1", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("name,value\n"));
    assert!(text.contains("gamma_bound_constant,0.3333333333333333"));
}

#[test]
fn quad_matches_the_gaussian_integral_and_dumps_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("cells.csv");
    let out = dunkl(&["quad", "--rs", "a1:k=1", "--field", "gaussian", "--dump-cells", cells.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 5.01325654926200100).abs() < 1e-7);
    let dump = std::fs::read_to_string(cells).unwrap();
    assert!(dump.starts_with("chart,lo,hi,value,error\n"));
    assert!(dump.lines().count() > 1);

    let ball = json(&dunkl(&["quad", "--rs", "a1:k=1", "--field", "constant:1", "--domain", "ball:1"]));
    // μ_k(B_1) = p(B_1)/d = 2·2/3 for A1 with k = 1.
    assert!((ball["value"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-8);
}

#[test]
fn heat_and_transform_of_the_gaussian() {
    // P_t e^{−|x|²/2} = (1+2t)^{−d/2} e^{−|x|²/(2(1+2t))}, with d = 3 here.
    let v = json(&dunkl(&["heat", "--rs", "a1:k=1", "--field", "gaussian", "--t", "1", "--at", "0.5"]));
    let expected = 3f64.powf(-1.5) * (-0.25f64 / 6.0).exp();
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-8);

    let z = json(&dunkl(&["transform", "--rs", "a1:k=1", "--field", "gaussian", "--xi", "1"]));
    assert!((z["re"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-8);
    assert!(z["im"].as_f64().unwrap().abs() < 1e-8);

    let nonproduct = dunkl(&["heat", "--rs", "a2:k=1", "--field", "gaussian", "--t", "1", "--at", "0,0"]);
    assert_eq!(nonproduct.status.code(), Some(1));
}

#[test]
fn besov_and_rearrange_run() {
    let v = json(&dunkl(&["besov", "--rs", "a1:k=1", "--field", "gaussian", "--s", "-1"]));
    assert!(v["besov_norm"].as_f64().unwrap().is_finite());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = dunkl(&["rearrange", "--rs", "a1:k=1", "--field", "gaussian", "--levels", "50", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let r = json(&out);
    assert!((r["sup"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let profile = std::fs::read_to_string(path).unwrap();
    assert_eq!(profile.lines().count(), 52);
}

#[test]
fn verify_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let tables = dir.path().join("tables");
    let out = dunkl(&[
        "verify",
        "--rs",
        "a1:k=1",
        "--suite",
        "NASH,ISO_RATIO",
        "--seed",
        "7",
        "--threads",
        "2",
        "--out",
        report.to_str().unwrap(),
        "--csv",
        tables.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["check_name"].as_str().unwrap()).collect();
    assert_eq!(names, ["NASH", "ISO_RATIO"]);
    assert!(tables.join("NASH.csv").is_file());
    assert!(tables.join("ISO_RATIO.csv").is_file());
}

#[test]
fn kernel_checks_are_skipped_without_a_closed_form_kernel() {
    let out = dunkl(&["verify", "--rs", "a2:k=1", "--suite", "HEAT_KERNEL"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"][0]["status"], "SKIPPED_UNSUPPORTED");
}

#[test]
fn tolerance_scale_can_turn_a_pass_into_a_fail() {
    let ok = dunkl(&["verify", "--rs", "a1:k=1", "--suite", "REARRANGEMENT"]);
    assert_eq!(ok.status.code(), Some(0));
    let strict = dunkl(&["verify", "--rs", "a1:k=1", "--suite", "REARRANGEMENT", "--tol-scale", "1e-3"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn list_names_every_check() {
    let out = dunkl(&["verify", "--list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.lines().any(|l| l == "PLANCHEREL"));
}
