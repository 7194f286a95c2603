use std::process::{Command, Output};

use semilie_core::satake::SatakeY;
use semilie_core::{LaurentSeries, QPoly};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilie"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&full)).expect("valid json")
}

#[test]
fn orbital_small_example() {
    assert_eq!(stdout(&["orbital", "-r", "1", "--vb", "0", "--vc", "1", "--ve", "0"]), "-T^-1 + 1 - T + T^2");
}

#[test]
fn orbital_vanishes_for_negative_ve() {
    assert_eq!(stdout(&["orbital", "--ve", "-1"]), "0");
}

#[test]
fn orbital_oracle_flag() {
    let text = stdout(&["orbital", "-r", "14", "--vb", "-5", "--vc", "100", "--ve", "3", "--oracle"]);
    assert!(text.ends_with("oracle: match"), "{text}");
    assert!(text.starts_with("-T^-9 + T^-8 - (q + 1)T^-7"), "{text}");
}

#[test]
fn gross_keating_example() {
    assert_eq!(stdout(&["gk", "--n1", "2", "--n2", "3"]), "q + 5");
}

#[test]
fn bc_s3_at_one() {
    assert_eq!(stdout(&["bc", "s3", "-r", "1"]), "q^2(Y+Y^-1) + q");
    assert_eq!(stdout(&["bc", "s3", "-r", "0", "--basis"]), "1");
}

#[test]
fn combo_example_sign() {
    assert_eq!(
        stdout(&["combo", "-r", "6", "--vb", "10", "--vc", "5", "--ve", "7", "--vda", "6"]),
        "q^7 + q^6 + q^5 + q^4 + q^3 + q^2 + q + 1"
    );
}

#[test]
fn kernel_matrix_double_prime() {
    let text = stdout(&["kernel-matrix", "--sum-bc", "1", "--vda", "0", "-N", "4", "--stage", "M''", "--certify"]);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0].split('|').map(str::trim).collect::<Vec<_>>(), ["1", "2", "3", "4", "5"]);
    assert_eq!(rows[5].split('|').map(str::trim).collect::<Vec<_>>(), ["0", "0", "0", "0", "-q^3"]);
    assert!(text.ends_with("certificate: PASS"));
}

#[test]
fn at_q_evaluates() {
    assert_eq!(stdout(&["--at-q", "3", "gk", "--n1", "2", "--n2", "3"]), "8");
    assert_eq!(stdout(&["bc", "s3", "-r", "1", "--at-q", "2"]), "4(Y+Y^-1) + 2");
}

#[test]
fn json_round_trips() {
    let v = json(&["orbital", "-r", "2", "--vb", "-5", "--vc", "100", "--ve", "20", "--vda", "1"]);
    let s = LaurentSeries::from_json(&v["series"]).unwrap();
    assert_eq!(s.to_string(), v["text"].as_str().unwrap());

    let v = json(&["derivative", "-r", "3", "--vb", "1", "--vc", "2", "--ve", "4"]);
    let d = QPoly::from_json(&v["derivative"]).unwrap();
    assert_eq!(d.to_string(), v["text"].as_str().unwrap());

    let v = json(&["bc", "s2", "-r", "3"]);
    let y: SatakeY = serde_json::from_value(v["image"].clone()).unwrap();
    assert_eq!(y.to_string(), v["text"].as_str().unwrap());
}

#[test]
fn volumes_match() {
    let text = stdout(&["volumes", "--precision", "3", "--xi", "1,0", "--rho", "2", "-n", "2", "--xi2", "1,3", "--rho2", "1"]);
    assert_eq!(text, "two_disk: enumerated 2/243 formula 2/243 (match)");
    let v = json(&["volumes", "--precision", "3", "--xi", "1,1", "--rho", "0", "-n", "1"]);
    assert_eq!(v["match"], Value::Bool(true));
}

#[test]
fn verify_small_suites_pass() {
    for suite in ["miracle", "afl", "oracle", "satake"] {
        let text = stdout(&["verify", suite]);
        assert!(text.ends_with("overall: PASS"), "{suite}: {text}");
    }
    let v = json(&["verify", "satake", "--rmax", "8"]);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn invalid_params_exit_two() {
    let out = run(&["orbital", "--vb", "0", "--vc", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must be odd"));
    assert_eq!(run(&["orbital", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["combo", "-r", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gk", "--n1", "3", "--n2", "1"]).status.code(), Some(2));
}
