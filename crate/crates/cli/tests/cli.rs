use std::fs;
use std::process::{Command, Output};

use acs6::cstruct::{j_from_octonion, CStructError};
use acs6::io::matrix_to_json;
use acs6::sphere::{random_unit_octonion, sample_rng};
use acs6::twistor::{isotopy_residual, random_so7, random_so7_haar, SO7Element};
use acs6::{Octonion, Rational};
use serde_json::Value;

fn acs6(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acs6"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = acs6(&[
        "verify",
        "--suite",
        "prop31",
        "--samples",
        "40",
        "--mode",
        "exact",
        "--seed",
        "7",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_json(&out);
    assert_eq!(r["suite"], "prop31");
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["samples"], 40);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["failures"], Value::Array(vec![]));
    assert_eq!(r["max_residual"], Value::Null);
    assert!(r["elapsed_ms"].is_u64());
}

#[test]
fn float_mode_reports_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = acs6(&[
        "verify",
        "--suite",
        "moufang",
        "--samples",
        "50",
        "--mode",
        "float",
        "--tol",
        "1e-9",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&out);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn reports_are_byte_identical_modulo_time() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = acs6(&[
            "verify",
            "--suite",
            "prop21",
            "--samples",
            "20",
            "--mode",
            "float",
            "--seed",
            "3",
            "--json",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let mut v = read_json(&path);
        v["elapsed_ms"] = Value::from(0);
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(acs6(&["verify", "--suite", "nosuch"]).status.code(), Some(2));
    assert_eq!(acs6(&["verify", "--mode", "fuzzy"]).status.code(), Some(2));
    assert_eq!(
        acs6(&["verify", "--suite", "moufang", "--samples", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(acs6(&["degree", "--map", "cube-root"]).status.code(), Some(2));
    assert_eq!(
        acs6(&["homotopy", "--space", "s6", "--k", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        acs6(&["homotopy", "--space", "xg", "--k", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        acs6(&["companion", "--matrix", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(acs6(&["chern"]).status.code(), Some(2));
}

#[test]
fn degree_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = acs6(&[
        "degree",
        "--map",
        "conjugation",
        "--trials",
        "3",
        "--seed",
        "5",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("conjugation: degree -1"));
    let r = read_json(&out);
    assert_eq!(r["degree"], -1);
    assert_eq!(r["trials"].as_array().unwrap().len(), 3);

    let o = acs6(&["degree", "--map", "squaring", "--rp7", "--trials", "1"]);
    assert_eq!(
        o.status.code(),
        Some(1),
        "squaring is even, so it does not descend"
    );
}

#[test]
fn companion_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    let l = random_so7_haar(&mut sample_rng(9, 0));
    fs::write(&path, matrix_to_json(l.matrix())).unwrap();
    let o = acs6(&["companion", "--matrix", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["residual"].as_f64().unwrap() < 1e-9);
    let a: Vec<f64> = r["a"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().parse().unwrap())
        .collect();
    assert!(isotopy_residual(&l, &Octonion::from_slice(&a)).1 < 1e-9);

    let exact: SO7Element<Rational> = random_so7(&mut sample_rng(9, 1));
    fs::write(&path, matrix_to_json(exact.matrix())).unwrap();
    let o = acs6(&["companion", "--matrix", path.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["residual"], 0.0);

    fs::write(&path, "[[1, 2], [3, 4]]").unwrap();
    assert_eq!(
        acs6(&["companion", "--matrix", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn recover_command() -> Result<(), CStructError> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.json");
    let x: Octonion<Rational> = random_unit_octonion(&mut sample_rng(4, 0));
    fs::write(&path, matrix_to_json(j_from_octonion(&x)?.matrix())).unwrap();
    let o = acs6(&["recover", "--matrix", path.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["round_trip"], true);
    Ok(())
}

#[test]
fn chern_command() {
    let o = acs6(&["chern", "--lemma22"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("c_2(τ_1 ⊗ τ_2) = c_1(τ_1)^2 + c_1(τ_1) c_1(τ_2) + c_2(τ_2)"));
    assert!(text.ends_with("Euler number = 1\n"));
    let o = acs6(&["chern", "--lemma22", "--json"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["euler_number"], 1);
    assert_eq!(r["normal_c2"], "a^2");
}

#[test]
fn homotopy_command() {
    let o = acs6(&["homotopy", "--space", "s6", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("π_4(S⁷) ⊕ π_10(S⁷)"));
    let o = acs6(&["homotopy", "--space", "xg", "--genus", "3", "--k", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("ℤ/2"));
    let o = acs6(&["homotopy", "--space", "xg", "--genus", "1", "--k", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("ℤ ⊕ ℤ/2"));

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("pi7.csv");
    fs::write(&table, "m,group,source\n7,Z,fixture\n13,Z/2,fixture\n").unwrap();
    let o = acs6(&[
        "homotopy",
        "--space",
        "s6",
        "--k",
        "7",
        "--table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("ℤ ⊕ ℤ/2"));
    fs::write(&table, "m,group,source\n7,Z,\n").unwrap();
    let o = acs6(&[
        "homotopy",
        "--space",
        "s6",
        "--k",
        "7",
        "--table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
