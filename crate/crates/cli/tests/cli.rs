use std::process::Command;

use serde_json::Value;
use steerkit_cli::error::CliError;
use steerkit_cli::format::Document;
use steerkit_core::conic::SolverError;
use steerkit_core::criteria::GaussianCovariance;
use steerkit_core::{assemblage_from_state, random, CoreError, MeasurementSet};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("steerkit").chain(args.iter().copied());
    let code = steerkit_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn assert_round_trip(doc: &Document) {
    let first = doc.to_json();
    let second = Document::parse(&first).unwrap().to_json();
    assert_eq!(first, second);
}

#[test]
fn documents_round_trip_byte_identical() {
    let mut r = random::rng(11);
    for d in [2, 3] {
        let rho = random::random_state(d * d, 3, &mut r);
        assert_round_trip(&Document::from_state(&rho, (d, d)));
        let ms = MeasurementSet::new((0..3).map(|_| random::random_projective(d, &mut r)).collect()).unwrap();
        assert_round_trip(&Document::from_measurements(&ms));
        assert_round_trip(&Document::from_assemblage(&assemblage_from_state(&rho, &ms).unwrap()));
    }
    assert_round_trip(&Document::from_covariance(&GaussianCovariance::two_mode_squeezed(0.37).unwrap()));
    for fam in [["--family", "werner"], ["--family", "one-way"]] {
        let (_, out, _) = run(&["make", fam[0], fam[1]]);
        assert_eq!(Document::parse(&out).unwrap().to_json() + "\n", out);
    }
}

#[test]
fn parsed_documents_rebuild_core_types() {
    let mut r = random::rng(12);
    let rho = random::random_state(4, 2, &mut r);
    let (back, dims) = Document::parse(&Document::from_state(&rho, (2, 2)).to_json())
        .unwrap()
        .to_state()
        .unwrap();
    assert_eq!(dims, (2, 2));
    assert_eq!(back.matrix(), rho.matrix());
    let doc = Document::from_state(&rho, (2, 2));
    assert!(doc.to_assemblage().is_err());
}

#[test]
fn detect_singlet_assemblage() {
    let dir = tempfile::tempdir().unwrap();
    let (_, asm, _) = run(&["make", "--family", "singlet", "--measurements", "paulis:xz"]);
    let path = write(&dir, "asm.json", &asm);
    let v = json(&["detect", "--assemblage", &path]);
    assert_eq!(v["steerable"], true);
    assert!(v["mu"].as_f64().unwrap() < 0.0);
    assert!(v["inequality"]["coefficients"].is_array());
    for key in ["tol", "status", "seed", "solver", "version", "kind"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let state = write(&dir, "w.json", &run(&["make", "--family", "werner", "--eta", "0.4"]).1);
    let v = json(&["detect", "--state", &state, "--measurements", "paulis:xyz"]);
    assert_eq!(v["steerable"], false);
    assert!(v["model"]["hidden"].is_array());
}

#[test]
fn quantify_and_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(&dir, "s.json", &run(&["make", "--family", "singlet"]).1);
    let base = ["--state", state.as_str(), "--measurements", "paulis:xz"];
    let r = json(&[&["quantify", "--measure", "robustness"][..], &base].concat());
    assert!((r["value"].as_f64().unwrap() - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-6);
    let w = json(&[&["quantify"][..], &base].concat());
    assert!((w["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let f = json(&[&["inequality"][..], &base].concat());
    assert!(f["value"].as_f64().unwrap() < 0.0);
    assert!(f["inequality"]["min_strategy_eig"].as_f64().unwrap() > -1e-8);
}

#[test]
fn thresholds_command() {
    let v = json(&["thresholds", "--family", "werner", "--class", "projective", "--d", "2"]);
    assert_eq!(v["threshold"], 0.5);
    assert_eq!(v["status"], "closed-form");
    let v = json(&["thresholds", "--family", "isotropic", "--class", "dichotomic", "--d", "3"]);
    assert!((v["threshold"].as_f64().unwrap() - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn radius_brackets_singlet() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(&dir, "w.json", &run(&["make", "--family", "werner", "--eta", "1"]).1);
    let v = json(&["radius", "--state", &state, "--dirs", "icosa6"]);
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= 0.5 && 0.5 <= hi, "[{lo}, {hi}]");
    assert!((v["tstate"]["radius"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn jm_and_criteria() {
    let v = json(&["jm", "--measurements", "paulis:xz"]);
    assert_eq!(v["jointly_measurable"], false);
    assert!((v["critical_visibility"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert_eq!(v["closed_form"]["jointly_measurable"], false);

    let dir = tempfile::tempdir().unwrap();
    let state = write(&dir, "s.json", &run(&["make", "--family", "singlet"]).1);
    let v = json(&["criteria", "--state", &state]);
    let all = v["criteria"].as_array().unwrap();
    assert_eq!(all.len(), 6);
    assert!(all.iter().all(|c| c["violated"] == true));

    let vac = write(&dir, "v.json", &run(&["make", "--family", "vacuum"]).1);
    let v = json(&["criteria", "--covariance", &vac]);
    assert!(v["criteria"].as_array().unwrap().iter().all(|c| c["steerable"] == false));
}

fn csv_rows(out: &str) -> Vec<Vec<String>> {
    out.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn werner_sweep_flips_at_inverse_sqrt3() {
    let (code, out, _) = run(&["sweep", "--family", "werner", "--from", "0", "--to", "1", "--step", "0.05"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["eta", "three-pauli", "verdict", "ccnr"]);
    assert_eq!(rows.len(), 22);
    for r in &rows[1..] {
        let eta: f64 = r[0].parse().unwrap();
        let expect = if eta > 1.0 / 3f64.sqrt() { "steerable" } else { "unsteerable" };
        assert_eq!(r[2], expect, "eta {eta}");
        assert_eq!(r[1].parse::<f64>().unwrap() > 1.0, eta > 1.0 / 3f64.sqrt());
    }
    assert!(out.ends_with('\n') && !out.contains('\r'));
}

#[test]
fn sweep_jobs_do_not_change_output() {
    let base = ["sweep", "--family", "isotropic", "--d", "2", "--from", "0.3", "--to", "0.9", "--step", "0.1"];
    let one = run(&[&base[..], &["--jobs", "1"]].concat()).1;
    let four = run(&[&base[..], &["--jobs", "4"]].concat()).1;
    assert_eq!(one, four);
}

#[test]
fn empty_sweep_has_header_only() {
    let (code, out, _) = run(&["sweep", "--family", "werner", "--from", "1", "--to", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out, "eta,three-pauli,verdict,ccnr\n");
}

#[test]
fn one_way_sweep_labels() {
    let (_, out, _) = run(&[
        "sweep", "--family", "one-way", "--from", "0.6", "--to", "0.6", "--thetas", "10", "--measurements", "axes:icosa6",
    ]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1], ["0.6", "10", "true", "true", "one-way"]);
}

#[test]
fn seeded_outputs_are_reproducible() {
    let a = run(&["make", "--family", "random", "--seed", "5"]).1;
    let b = run(&["make", "--family", "random", "--seed", "5"]).1;
    let c = run(&["make", "--family", "random", "--seed", "6"]).1;
    assert_eq!(a, b);
    assert_ne!(a, c);
    let dir = tempfile::tempdir().unwrap();
    let state = write(&dir, "r.json", &a);
    let x = run(&["detect", "--state", &state, "--measurements", "paulis:xyz", "--seed", "5"]).1;
    let y = run(&["detect", "--state", &state, "--measurements", "paulis:xyz", "--seed", "5"]).1;
    assert_eq!(x, y);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["detect", "--nope"]).0, 1);
    assert_eq!(run(&["detect"]).0, 1);
    assert_eq!(run(&["thresholds", "--family", "x", "--class", "projective", "--d", "2"]).0, 1);
    assert_eq!(run(&["detect", "--state", "/nonexistent.json", "--measurements", "paulis:xz"]).0, 2);
    assert_eq!(run(&["thresholds", "--family", "werner", "--class", "projective", "--d", "1"]).0, 2);
    assert_eq!(run(&["sweep", "--family", "werner", "--step", "0"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "b.json", r#"{"version": 9, "kind": "state", "dims": [1, 1], "matrix": [[[1, 0]]]}"#);
    let (code, _, err) = run(&["radius", "--state", &bad]);
    assert_eq!(code, 2, "{err}");
    let notpsd = write(&dir, "n.json", r#"{"version": 1, "kind": "state", "dims": [1, 2], "matrix": [[[2, 0], [0, 0]], [[0, 0], [-1, 0]]]}"#);
    assert_eq!(run(&["criteria", "--state", &notpsd]).0, 2);

    let solver = CliError::from(CoreError::Solver(SolverError::Numerical("breakdown".into())));
    assert_eq!(solver.exit_code(), 3);
}

#[test]
fn binary_honours_env_solver_and_out() {
    let exe = env!("CARGO_BIN_EXE_steerkit");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let status = Command::new(exe)
        .args(["thresholds", "--family", "werner", "--class", "projective", "--d", "3", "--out"])
        .arg(&out)
        .env("STEERKIT_SOLVER", "ipm-safe")
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["threshold"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);

    let o = Command::new(exe)
        .args(["jm", "--measurements", "paulis:xz"])
        .env("STEERKIT_SOLVER", "ipm-safe")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solver"], "ipm-safe");
    let bad = Command::new(exe)
        .args(["jm", "--measurements", "paulis:xz"])
        .env("STEERKIT_SOLVER", "nope")
        .status()
        .unwrap();
    assert_eq!(bad.code(), Some(1));
}
