mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilforms(args: &[&str], input: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nilforms"));
    cmd.arg(args[0]).arg("--in").arg(input).args(&args[1..]);
    match threads {
        Some(t) => cmd.env("NILFORMS_THREADS", t),
        None => cmd.env_remove("NILFORMS_THREADS"),
    };
    cmd.output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn heisenberg_algebra_report() {
    let out = nilforms(&["algebra"], &common::fixture("heisenberg.json"), None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "nilforms/1");
    assert_eq!(r["results"]["betti"], serde_json::json!([1, 2, 2, 1]));
    assert_eq!(r["results"]["gate"]["class"], "B1_CODIM1");
    assert_eq!(r["passed"], true);
    let lambda = r["results"]["central_dual_eigenform"]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() < 1e-12);
}

#[test]
fn abelian_is_flat_torus() {
    let out = nilforms(&["algebra"], &common::fixture("abelian4.json"), None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["gate"]["class"], "FLAT_TORUS");
}

#[test]
fn malformed_input_exits_1_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = nilforms(
        &["algebra", "--out", out_path.to_str().unwrap()],
        &common::fixture("malformed.json"),
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out_path.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("constants[0].value"));
}

#[test]
fn kind_mismatch_and_bad_flags_exit_1() {
    let heis = common::fixture("heisenberg.json");
    assert_eq!(nilforms(&["bundle"], &heis, None).status.code(), Some(1));
    assert_eq!(nilforms(&["algebra", "--res", "16"], &heis, None).status.code(), Some(1));
    assert_eq!(nilforms(&["algebra", "--tol", "-1"], &heis, None).status.code(), Some(1));
    assert_eq!(nilforms(&["algebra"], &heis, Some("0")).status.code(), Some(1));
    assert_eq!(nilforms(&["algebra"], Path::new("/nonexistent.json"), None).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_nilforms")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_check_exits_2_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("wrong.json");
    std::fs::write(
        &input,
        r#"{"schema": "nilforms/1", "kind": "algebra", "n_h": 2, "n_v": 1,
            "constants": [{"i": 1, "j": 2, "k": 1, "value": 1.0}],
            "expect": {"betti": [1, 3, 3, 1]}}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let out = nilforms(&["algebra", "--out", out_path.to_str().unwrap()], &input, None);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["passed"], false);
    let failed: Vec<_> = r["verdicts"].as_array().unwrap().iter().filter(|v| v["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["check"], "betti");
}

#[test]
fn bundle_tables_and_tolerance_echo() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tables");
    let out = nilforms(
        &["bundle", "--res", "16", "--tol", "1e-6", "--csv", csv.to_str().unwrap()],
        &common::fixture("heisenberg-pseudo.json"),
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["options"]["res"], 16);
    let verdict = r["verdicts"].as_array().unwrap().iter().find(|v| v["check"] == "harmonic_norm_variation").unwrap();
    assert_eq!(verdict["tol"].as_f64(), Some(1e-6));
    assert_eq!(r["results"]["discriminator"]["is_left_invariant"], false);
    for name in ["eigenvalues", "kernel_norms", "systole"] {
        assert!(csv.join(format!("{name}.csv")).exists(), "{name}");
    }
    let systole = std::fs::read_to_string(csv.join("systole.csv")).unwrap();
    assert!(systole.starts_with("lattice_id,lambda1,lambda1_dual,product,vol,stsys1,sys_nm1,ratio,equality_flag\n"));
}

#[test]
fn hexagonal_systole_and_bk_range() {
    let out = nilforms(&["systole"], &common::fixture("systole-hex.json"), None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let product = r["results"]["lattices"][0]["report"]["product"].as_f64().unwrap();
    assert!((product - 2.0 / 3f64.sqrt()).abs() < 1e-12);

    let out = nilforms(&["bk"], &common::fixture("bk.json"), None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let fine = &r["results"]["levels"][2];
    assert!((fine["inner_min"].as_f64().unwrap() + 2.0 / 3.0).abs() < 1e-3);
    assert!((fine["inner_max"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-3);
}

#[test]
fn identity_seed_override_is_reproducible() {
    let input = common::fixture("identity.json");
    let a = nilforms(&["identity", "--res", "32", "--seed", "5"], &input, Some("1"));
    let b = nilforms(&["identity", "--res", "32", "--seed", "5"], &input, Some("4"));
    let c = nilforms(&["identity", "--res", "32", "--seed", "6"], &input, Some("1"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
