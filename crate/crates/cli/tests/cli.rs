use std::path::PathBuf;
use std::process::{Command, Output};

use agcover::{InvariantReport, SingularProfile};
use serde_json::Value;
use tempfile::TempDir;

fn agcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agcover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_profile(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const CUBIC: &str = r#"{"d":3,"N":3,"s3_odd":{"0":6}}"#;

#[test]
fn cubic_invariants() {
    let dir = TempDir::new().unwrap();
    let path = write_profile(&dir, "cubic.json", CUBIC);
    let out = agcover(&["invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["K_square"], 3);
    assert_eq!(v["euler_X"], 9);
    assert_eq!(v["chi_OX"]["num"], 1);
    assert_eq!(v["chi_OX"]["den"], 1);
    assert_eq!(v["noether_ok"], true);
}

#[test]
fn invariants_round_trip() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"d":6,"N":4,"s3_odd":{"0":24},"s2":{"1":12}}"#;
    let path = write_profile(&dir, "p.json", text);
    let out = agcover(&["invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: InvariantReport = serde_json::from_slice(&out.stdout).unwrap();
    let p = SingularProfile::from_json(text).unwrap();
    assert_eq!(parsed, InvariantReport::compute(&p));
}

#[test]
fn local_model_verifies() {
    let out = agcover(&["local-model", "--n", "2", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["branch_curve"], "v^2 - 4*u^6");
}

#[test]
fn check_rejects_single_cusp() {
    let dir = TempDir::new().unwrap();
    let path = write_profile(&dir, "bad.json", r#"{"d":3,"N":3,"s3_odd":{"0":1}}"#);
    let out = agcover(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    let cusp = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "cusp_divisibility")
        .unwrap();
    assert_eq!(cusp["passed"], false);
    assert_eq!(v["admissible"], false);
}

#[test]
fn brute_force_and_pruned_agree() {
    let base = [
        "enumerate",
        "--d",
        "2",
        "--N",
        "3",
        "--k-max",
        "1",
        "--cap",
        "6",
    ];
    let pruned = agcover(&base);
    let mut args = base.to_vec();
    args.push("--brute-force");
    let brute = agcover(&args);
    assert_eq!(pruned.status.code(), Some(0));
    assert_eq!(brute.status.code(), Some(0));
    let (p, b) = (stdout_json(&pruned), stdout_json(&brute));
    assert_eq!(p["profiles"], b["profiles"]);
    assert_eq!(b["query"]["mode"], "brute_force");
}

#[test]
fn enumerate_is_deterministic_across_jobs() {
    let one = agcover(&["enumerate", "--d", "4", "--k-max", "1", "--jobs", "1"]);
    let four = agcover(&["enumerate", "--d", "4", "--k-max", "1", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn galois_report_flags() {
    let dir = TempDir::new().unwrap();
    let path = write_profile(&dir, "cubic.json", CUBIC);
    let out = agcover(&["galois", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["eZ_assembled"]["num"], 24);
    assert!(v["discrepancy_flags"]
        .as_array()
        .unwrap()
        .contains(&Value::from("eZ_closed_vs_assembled")));
}

#[test]
fn monodromy_certificate() {
    let out = agcover(&["monodromy", "--model", "s3", "--index", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["group"], "S3");
    assert_eq!(v["order"], 6);
    assert_eq!(v["certified"], true);
    let again = agcover(&["monodromy", "--model", "s3", "--index", "1"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn table_format_prints_rationals_as_fractions() {
    let dir = TempDir::new().unwrap();
    let path = write_profile(&dir, "p.json", r#"{"d":4,"N":3,"s3_odd":{"0":1}}"#);
    let out = agcover(&["--format", "table", "invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let chi = text.lines().find(|l| l.starts_with("chi_OX")).unwrap();
    assert!(chi.ends_with("14/3"), "{chi}");
}

#[test]
fn exit_codes() {
    assert_eq!(agcover(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(agcover(&["enumerate"]).status.code(), Some(64));
    assert_eq!(agcover(&["--help"]).status.code(), Some(0));
    assert_eq!(
        agcover(&["invariants", "/no/such/profile.json"])
            .status
            .code(),
        Some(66)
    );
    let dir = TempDir::new().unwrap();
    let garbage = write_profile(&dir, "g.json", "{not json");
    assert_eq!(
        agcover(&["invariants", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let invalid = write_profile(&dir, "i.json", r#"{"d":3,"N":2,"s3_odd":{"0":6}}"#);
    assert_eq!(
        agcover(&["invariants", invalid.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        agcover(&["galois", invalid.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
