use std::path::{Path, PathBuf};
use std::process::Command;

use caratheodory_cli::{Outcome, RunReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_caratheodory"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> (i32, RunReport) {
    let out = bin().arg("--json").args(args).output().expect("binary runs");
    let report: RunReport = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr)));
    (out.status.code().expect("exit code"), report)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn constant_one_kernel_passes() {
    let (code, r) = run(&["check-kernel", data("constant_one.json").to_str().unwrap(), "--samples", data("samples.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.outcome, Outcome::Pass);
    assert_eq!(r.metrics["n_negative"], 0.0);
    assert!(r.witness.is_none());
}

#[test]
fn counterexample_kernel_fails_with_one_negative_square() {
    let (code, r) = run(&[
        "check-kernel",
        data("counterexample.json").to_str().unwrap(),
        "--samples",
        data("counterexample_samples.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert_eq!(r.outcome, Outcome::Fail);
    assert_eq!(r.metrics["n_negative"], 1.0);
    let w = r.witness.expect("FAIL carries a witness");
    assert_eq!(w["n_negative"], 1);
    let lo = (1.0 - 2f64.sqrt()) / 2.0;
    assert!((r.metrics["worst_eigenvalue"] - lo).abs() < 1e-12);
}

#[test]
fn malformed_json_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", "{\"kind\": \"constant\",\n  \"value\": [[[1, 0]]\n");
    let (code, r) = run(&["check-kernel", &spec, "--random", "4"]);
    assert_eq!(code, 2);
    assert_eq!(r.outcome, Outcome::Error);
    assert!(r.message.unwrap().contains("line"));
}

#[test]
fn unknown_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", r#"{"kind": "constant", "value": [[[1, 0]]], "colour": 3}"#);
    let (code, r) = run(&["check-kernel", &spec, "--random", "4"]);
    assert_eq!(code, 2);
    assert!(r.message.unwrap().contains("colour"));
}

#[test]
fn negative_constant_fails_on_random_points() {
    let (code, r) = run(&["check-kernel", data("negative_one.json").to_str().unwrap(), "--random", "5", "--seed", "7"]);
    assert_eq!(code, 1);
    assert_eq!(r.seed, Some(7));
    assert_eq!(r.metrics["n_negative"], 5.0);
}

#[test]
fn realize_cayley_atom_with_holdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, r) = run(&[
        "realize",
        data("cayley_atom_samples.json").to_str().unwrap(),
        "--holdout",
        data("cayley_atom_holdout.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r:?}");
    assert!(r.metrics["holdout_max_relative_error"] <= 1e-6);
    assert!(r.metrics["isometry_defect"] <= 1e-8);
    assert_eq!(r.artifacts, vec![out.display().to_string()]);
    let back = caratheodory::io::realization_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let v = back.evaluate(num_complex::Complex64::new(0.5, 0.0)).unwrap();
    assert!((v[(0, 0)].re - 3.0).abs() < 1e-9);
}

#[test]
fn realize_counterexample_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, r) =
        run(&["realize", data("counterexample_samples.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(r.witness.unwrap()["n_negative"], 1);
    assert!(!out.exists());
}

#[test]
fn realize_without_origin_names_the_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, r) = run(&["realize", data("cayley_atom_holdout.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(r.message.unwrap().contains("origin"));
}

#[test]
fn herglotz_eval_unit_atom() {
    let out = bin().args(["herglotz", "eval", data("unit_atom.json").to_str().unwrap(), "--at", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("phi(0.5) = 3"), "{text}");
}

#[test]
fn herglotz_eval_rejects_points_outside_the_disk() {
    let (code, r) = run(&["herglotz", "eval", data("unit_atom.json").to_str().unwrap(), "--at", "1.5,0"]);
    assert_eq!(code, 2);
    assert!(r.message.is_some());
}

#[test]
fn herglotz_recover_negative_constant_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let (code, r) =
        run(&["herglotz", "recover", data("negative_one.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    let w = r.witness.unwrap();
    assert!(w["min_eigenvalue"].as_f64().unwrap() < 0.0);
}

#[test]
fn herglotz_recover_constant_writes_measure_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let table = dir.path().join("moments.txt");
    let (code, r) = run(&[
        "herglotz",
        "recover",
        data("constant_one.json").to_str().unwrap(),
        "--grid",
        "256",
        "--out",
        out.to_str().unwrap(),
        "--table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r:?}");
    assert!((r.metrics["moment_0_norm"] - 1.0).abs() < 1e-6);
    assert!(r.metrics["moment_1_norm"] < 1e-6);
    assert_eq!(r.metrics["atoms"], 0.0);
    let mu = caratheodory::io::measure_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(mu.density().len(), 256);
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("k norm"));
}

#[test]
fn herglotz_roundtrip_two_atoms() {
    let (code, r) = run(&["herglotz", "roundtrip", "--random", "--seed", "11", "--atoms", "2", "--grid", "256"]);
    assert_eq!(code, 0, "{r:?}");
    assert!(r.metrics["max_moment_deviation"] <= 1e-3);
}

#[test]
fn selftest_core_passes_and_unknown_suite_errors() {
    let (code, r) = run(&["selftest", "--suite", "core", "--seed", "0"]);
    assert_eq!(code, 0);
    assert!(r.metrics.keys().any(|k| k.starts_with("core.")));
    let (code, _) = run(&["selftest", "--suite", "everything"]);
    assert_eq!(code, 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["check-kernel", data("constant_one.json").to_str().unwrap(), "--random", "6", "--seed", "3"].map(String::from);
    let a: Vec<&str> = args.iter().map(String::as_str).collect();
    let (_, first) = run(&a);
    let (_, second) = run(&a);
    assert_eq!(first, second);
    let (_, other_seed) = run(&["check-kernel", data("constant_one.json").to_str().unwrap(), "--random", "6", "--seed", "4"]);
    assert_ne!(first.inputs_digest, other_seed.inputs_digest);
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .args(["--json", "--report", path.to_str().unwrap(), "selftest", "--suite", "helly"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn thread_cap_is_validated() {
    let out = bin().env("CARATHEODORY_NUM_THREADS", "zero").args(["selftest", "--suite", "core"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().env("CARATHEODORY_NUM_THREADS", "1").args(["selftest", "--suite", "core"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_arguments_exit_with_error_code() {
    let out = bin().args(["check-kernel", data("constant_one.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
