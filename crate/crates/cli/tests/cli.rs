use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-wavelet")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// ψ_{0,0,1} at p = 2 on Z_2 at resolution 1, plus `c` on both cells.
fn mother_plus_constant(c: i64) -> String {
    format!(
        r#"{{"prime": 2, "support_exponent": 0, "resolution_exponent": 1,
 "cells": [{{"digits": [0], "mag_num": {}, "mag_den": 1, "phase_num": 0, "phase_den": 1}},
           {{"digits": [1], "mag_num": {}, "mag_den": 1, "phase_num": 0, "phase_den": 1}}]}}"#,
        1 + c,
        -1 + c
    )
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["check", "algebra", "--help"])), 0);
}

#[test]
fn mother_wavelet_table_at_p2() {
    let out = ok(&["wavelet", "table", "--index", "0::1", "--format", "csv"]);
    assert_eq!(out.lines().next().unwrap(), "cell_label,norm_exponent,phase_num,phase_den,magnitude");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    // |ξ| < 1: value 1
    assert_eq!(rows[0][1..], ["-inf", "0", "1", "1"]);
    // |ξ| = 1: value e(1/2) = −1
    assert_eq!(rows[1][1..], ["0", "1", "2", "1"]);
}

#[test]
fn scaled_wavelet_support_grows_to_p() {
    for p in ["2", "3", "5"] {
        let out = ok(&["--prime", p, "wavelet", "table", "--index", "1::1", "--format", "csv"]);
        let rows = csv_rows(&out);
        assert_eq!(rows.len().to_string(), p);
        let max_norm = rows.iter().filter_map(|r| r[1].parse::<i64>().ok()).max().unwrap();
        assert_eq!(max_norm, 1, "p={p}");
        for r in &rows {
            // amplitude p^(−1/2)
            assert_eq!(r[4], format!("1/{p}*sqrt({p})"));
        }
    }
    let v = json(&["wavelet", "table", "--index", "1::1"]);
    let cells = v["tables"][0]["cells"].as_array().unwrap();
    assert!(cells.iter().all(|c| c["mag_surd"] == true && c["mag_den"] == 2));
}

#[test]
fn empty_index_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = run(&["wavelet", "table", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "cell_label,norm_exponent,phase_num,phase_den,magnitude\n");
}

#[test]
fn whole_window_table() {
    let v = json(&["--prime", "3", "--window", "-1:1:1", "wavelet", "table", "--all"]);
    // 3 scales × 3 classes of m × 2 values of j
    assert_eq!(v["tables"].as_array().unwrap().len(), 18);
}

#[test]
fn usage_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["bogus"],
        &["wavelet", "table", "--index"],
        &["--prime", "4", "wavelet", "table", "--index", "0::1"],
        &["--prime", "1", "check", "algebra"],
        &["wavelet", "table", "--index", "0:1"],
        &["wavelet", "table", "--index", "0::2"],
        &["wavelet", "table", "--index", "0:2:1"],
        &["--window", "0:1", "wavelet", "table", "--index", "2::1"],
        &["--window", "3:1", "check", "algebra"],
        &["--tolerance", "0", "check", "algebra"],
        &["--cap", "0", "check", "algebra"],
        &["--precision", "0", "wavelet", "eval", "--index", "0::1", "--point", "1"],
        &["--format", "xml", "check", "algebra"],
        &["check", "algebra", "--relation", "deformed", "--alpha", "zero"],
        &["--prime", "3", "wavelet", "eval", "--index", "0::1", "--point", "2^0 * (1) ~ O(2^1)"],
        &["analyze", "--input", "/nonexistent/f.json"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn irrational_order_needs_float_mode() {
    let o = run(&["check", "algebra", "--relation", "deformed", "--alpha", "0.3"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--mode float"));
    ok(&["--mode", "float", "check", "algebra", "--relation", "deformed", "--alpha", "0.3"]);
}

#[test]
fn malformed_input_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"prime\": 2,\n \"support_exponent\": 0,\n \"cells\": [1,}");
    let o = run(&["analyze", "--input", &bad]);
    assert_eq!(code(&o), 1);
    let msg = stderr(&o);
    assert!(msg.contains("line 3") && msg.contains("cells[0]"), "{msg}");

    let bad = write(
        dir.path(),
        "digits.json",
        r#"{"prime": 2, "support_exponent": 0, "resolution_exponent": 1,
 "cells": [{"digits": [0, 1], "mag_num": 1, "mag_den": 1, "phase_num": 0, "phase_den": 1}]}"#,
    );
    let o = run(&["fourier", "--input", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("digits"), "{}", stderr(&o));

    let o = run(&["--prime", "3", "analyze", "--input", &write(dir.path(), "f.json", &mother_plus_constant(0))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("2-adic"));
}

#[test]
fn algebra_checks_pass() {
    let cases: &[&[&str]] = &[
        &["check", "algebra"],
        &["--prime", "3", "check", "algebra", "--relation", "sl2"],
        &["--prime", "5", "--window", "-2:2:1", "check", "algebra"],
        &["check", "algebra", "--relation", "witt", "--range", "3"],
        &["--prime", "3", "check", "algebra", "--relation", "deformed", "--alpha", "2"],
        &["--prime", "3", "check", "algebra", "--relation", "semigroup", "--alpha", "1", "--beta", "1/2"],
        &["--prime", "3", "check", "algebra", "--relation", "translation", "--alpha", "3/2"],
        &["--mode", "float", "--prime", "5", "check", "algebra", "--relation", "deformed", "--alpha", "0.3"],
    ];
    for args in cases {
        let v = json(args);
        let rows = v.as_array().unwrap();
        assert!(!rows.is_empty());
        for r in rows {
            assert_eq!(r["status"], "pass", "{args:?} {r}");
            assert!(r["checked"].as_u64().unwrap() > 0);
            assert!(r["first_failure"].is_null());
        }
    }
    let v = json(&["check", "algebra", "--relation", "sl2"]);
    assert!(v.as_array().unwrap().iter().all(|r| r["max_residual"] == 0.0));
}

#[test]
fn witt_default_covers_indices_up_to_three() {
    let out = ok(&["check", "algebra", "--relation", "witt", "--format", "csv"]);
    let rows = csv_rows(&out);
    // [l_m, l_n] for m, n in −3..=3
    assert_eq!(rows.len(), 49);
    assert!(rows.iter().all(|r| r.contains(&"pass".to_string())));
}

#[test]
fn corrupted_relation_exits_two_and_names_the_index() {
    let o = run(&["check", "algebra", "--corrupt", "--format", "csv"]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("relation violated") && msg.contains("n=") && msg.contains("j="), "{msg}");
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn insufficient_precision_exits_two() {
    // support 9 + 27 Z_3, phase needs the point modulo 3^4
    let o = run(&["--prime", "3", "wavelet", "eval", "--index", "-3:1:1", "--point", "3^2 * (1) ~ O(3^3)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("precision"));
    let v = json(&["--prime", "3", "wavelet", "eval", "--index", "-3:1:1", "--point", "3^2 * (1 + 0*3) ~ O(3^4)"]);
    assert_eq!(v["value"]["mag_surd"], true);
    assert_eq!(v["value"]["mag_num"], 3);
}

#[test]
fn eval_matches_table() {
    let v = json(&["wavelet", "eval", "--index", "0::1", "--point", "1/3"]);
    // 1/3 is a unit: value −1
    assert_eq!(v["value"]["phase_num"], 1);
    assert_eq!(v["value"]["phase_den"], 2);
    let out = ok(&["wavelet", "eval", "--index", "0::1", "--point", "2", "--format", "csv"]);
    assert!(out.lines().nth(1).unwrap().ends_with(",1"));
}

#[test]
fn resource_cap_exits_three() {
    let cases: &[&[&str]] = &[
        &["--cap", "1", "wavelet", "table", "--index", "0::1"],
        &["--cap", "10", "--window", "-5:5:3", "wavelet", "table", "--all"],
        &["--cap", "2", "haar", "sample", "--level", "1", "--points", "4"],
        &["--cap", "3", "expand-monomial", "--degree", "2", "--levels", "3"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 3, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("cap"));
    }
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &mother_plus_constant(0));
    assert_eq!(code(&run(&["--cap", "1", "fourier", "--input", &f])), 3);
}

#[test]
fn single_wavelet_analyzes_to_one_unit_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &mother_plus_constant(0));
    let o = run(&["analyze", "--input", &f, "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n,m_digits,j,re,im,exact\n0,,1,1.0000000000000000e0,0.0000000000000000e0,1\n");
    assert!(stderr(&o).contains("mean component norm: 0.0"));
}

#[test]
fn nonzero_mean_is_reported_and_round_trip_holds() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &mother_plus_constant(2));
    let e = dir.path().join("e.json");
    for mode in ["float", "exact"] {
        let o = run(&["--mode", mode, "analyze", "--input", &f, "-o", e.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let msg = stderr(&o);
        assert!(msg.contains("mean component norm: 2.0"), "{msg}");
        assert!(msg.contains("round trip residual norm: 2.0"), "{msg}");
        assert!(msg.contains("residual minus mean component: 0.0"), "{msg}");
    }
    // the synthesized part is the mean-zero part
    let out = ok(&["synthesize", "--input", e.to_str().unwrap(), "--format", "csv"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0][4], "1");
    assert_eq!(rows[1][4], "-1");
}

#[test]
fn fourier_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &mother_plus_constant(2));
    let g = dir.path().join("g.json");
    ok(&["fourier", "--input", &f, "-o", g.to_str().unwrap()]);
    let back = ok(&["fourier", "--inverse", "--input", g.to_str().unwrap(), "--format", "csv"]);
    let rows = csv_rows(&back);
    assert_eq!((rows[0][4].as_str(), rows[1][4].as_str()), ("3", "1"));
}

#[test]
fn monomial_expansion_and_conventions() {
    let v = json(&["expand-monomial", "--degree", "2", "--levels", "2"]);
    assert_eq!(v["constant"], "1/3");
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    let out = ok(&["--convention", "scaled", "expand-monomial", "--degree", "1", "--levels", "1", "--format", "csv"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0][0], "constant");
    assert_eq!(rows[0][5], "1/2");
    // ∫ x Ψ = −1/4 orthonormally, √2 times that in the other convention
    assert_eq!(rows[1][5], "-1/4*sqrt(2)");
    let re: f64 = rows[1][3].parse().unwrap();
    assert!((re + 2f64.sqrt() / 4.0).abs() < 1e-15);
}

#[test]
fn haar_samples() {
    let out = ok(&["haar", "sample", "--level", "0", "--points", "4", "--format", "csv"]);
    let exact: Vec<_> = csv_rows(&out).into_iter().map(|r| r[4].clone()).collect();
    assert_eq!(exact, ["1", "1", "-1", "-1"]);
}

#[test]
fn monna_map() {
    let out = ok(&["--precision", "6", "monna-map", "--point", "1/3", "--format", "csv"]);
    assert_eq!(csv_rows(&out)[0][1], "53/64");
    let v = json(&["monna-map", "--index", "0::1"]);
    assert_eq!(v["haar"]["level"], 0);
    assert_eq!(v["pieces"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["--prime", "3", "--window", "-1:1:2", "wavelet", "table", "--all", "--format", "csv"],
        &["--prime", "5", "--window", "-1:1:1", "wavelet", "table", "--all"],
        &["--prime", "3", "--seed", "7", "check", "algebra", "--relation", "translation", "--alpha", "1/2"],
        &["--mode", "float", "check", "algebra", "--relation", "deformed", "--alpha", "0.7", "--format", "csv"],
        &["--prime", "3", "expand-monomial", "--degree", "3"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut texts = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{i}-{k}"));
            let mut a = args.to_vec();
            a.extend(["-o", path.to_str().unwrap()]);
            ok(&a);
            texts.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(texts[0], texts[1], "{args:?}");
        assert_eq!(texts[0], ok(args).into_bytes(), "{args:?}: file and stdout differ");
    }
}
