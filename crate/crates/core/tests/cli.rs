//! End-to-end runs of the `spatial-infinity` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spatial-infinity"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join(name)).unwrap()).unwrap()
}

#[test]
fn modes_writes_tables_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["modes", "--override", "l_max=2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("l,psi,re_f,im_f,re_df,im_df"));
    let ls: Vec<usize> = lines.map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ls.len(), 2 * 601);
    assert!(ls.iter().all(|&l| (1..=2).contains(&l)));
    let j = report(dir.path(), "modes.json");
    assert_eq!(j["schema_version"], 1);
    for m in j["report"]["modes"].as_array().unwrap() {
        assert!(m["ode_residual"].as_f64().unwrap() < 1e-6);
        assert!(m["kg_norm_drift"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn modes_rejects_l_max_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["modes", "--override", "l_max=0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectral_standard_nonstandard_and_failing_species() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["spectral"]).status.code(), Some(0));
    assert_eq!(report(dir.path(), "spectral.json")["report"]["triple"]["kappa"], 1.0);

    assert_eq!(run(dir.path(), &["spectral", "--override", "c=1.5"]).status.code(), Some(0));
    assert_eq!(report(dir.path(), "spectral.json")["report"]["triple"]["kappa"], 1.5);

    assert_eq!(run(dir.path(), &["spectral", "--override", "species=[1,0.5]"]).status.code(), Some(1));
    let j = report(dir.path(), "spectral.json");
    assert_eq!(j["report"]["universality"]["checks"]["universality_ok"], false);
    assert!(j["report"]["universality"]["witness"].is_object());
}

#[test]
fn decompose_fields() {
    let dir = tempfile::tempdir().unwrap();
    for (field, q, tol) in [("coulomb", 1.0, 1e-6), ("boosted", 1.0, 1e-4), ("zero", 0.0, 1e-12)] {
        let o = run(dir.path(), &["decompose", field, "--override", "sphere_degree=12"]);
        assert_eq!(o.status.code(), Some(0), "{field}: {}", String::from_utf8_lossy(&o.stdout));
        let j = report(dir.path(), "decompose.json");
        assert!((j["report"]["q"].as_f64().unwrap() - q).abs() < tol, "{field}");
        let csv = fs::read_to_string(dir.path().join("decompose.csv")).unwrap();
        assert!(csv.starts_with("Q,"));
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"rapidity": 0.5, "seed": 3}"#).unwrap();
    let o = run(dir.path(), &["bremsstrahlung", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let j = report(dir.path(), "bremsstrahlung.json");
    assert_eq!(j["report"]["rapidity"], 0.5);

    fs::write(&cfg, r#"{"rapidity": 0.5, "colour": "red"}"#).unwrap();
    assert_eq!(run(dir.path(), &["bremsstrahlung", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(run(dir.path(), &["bremsstrahlung", "--seed", "11"]).status.code(), Some(0));
        assert_eq!(run(dir.path(), &["retarded"]).status.code(), Some(0));
    }
    for f in ["bremsstrahlung.csv", "bremsstrahlung.json", "retarded.csv", "retarded.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn testspace_audit_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["testspace-audit"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let probes = report(dir.path(), "probes.json");
    assert_eq!(probes["outside"]["type"], "conic");
}
