use std::f64::consts::PI;

use exptaylor_cli::{exit, run};

const TWO_PI_I: &str = "0+6.283185307179586i";

fn call(args: &[&str]) -> exptaylor_cli::Outcome {
    run(std::iter::once("exptaylor").chain(args.iter().copied()))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn expand_cosine_rows() {
    let out = call(&["expand", "--fn", "cos(2*pi*x)", "--lambda", TWO_PI_I, "--x0", "0", "--order", "5", "--format", "csv"]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[2][0], "2");
    let re: f64 = rows[2][1].parse().unwrap();
    let im: f64 = rows[2][2].parse().unwrap();
    assert!((re - 0.5).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn expand_json_schema() {
    let out = call(&["expand", "--fn", "x", "--lambda", TWO_PI_I, "--x0", "0", "--order", "3", "--format", "json"]);
    assert_eq!(out.code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["lambda"]["im"].as_f64().unwrap(), 2.0 * PI);
    assert_eq!(v["x0"].as_f64().unwrap(), 0.0);
    assert_eq!(v["order"], 3);
    let c1 = &v["coeffs"][1];
    assert_eq!(c1["index"], 1);
    assert!(c1["re"].as_f64().unwrap().abs() < 1e-15);
    assert!((c1["im"].as_f64().unwrap() + 1.0 / (2.0 * PI)).abs() < 1e-15);
}

#[test]
fn csv_round_trips_doubles() {
    let out = call(&["expand", "--fn", "exp(x)", "--lambda", "0.7+0.3i", "--x0", "0.2", "--order", "6", "--format", "csv"]);
    let json = call(&["expand", "--fn", "exp(x)", "--lambda", "0.7+0.3i", "--x0", "0.2", "--order", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    for (j, row) in csv_rows(&out.stdout).iter().enumerate() {
        let re: f64 = row[1].parse().unwrap();
        assert_eq!(re, v["coeffs"][j]["re"].as_f64().unwrap());
    }
}

#[test]
fn missing_function_is_usage_error() {
    let out = call(&["expand", "--lambda", "1", "--order", "3"]);
    assert_eq!(out.code, exit::VALIDATION);
    assert!(out.stderr.contains("Usage"));
    assert!(out.stdout.is_empty());
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(call(&["--help"]).code, exit::OK);
    assert_eq!(call(&["sweep", "--help"]).code, exit::OK);
    assert_eq!(call(&["--version"]).code, exit::OK);
}

#[test]
fn validation_errors() {
    let cases: &[&[&str]] = &[
        &["expand", "--fn", "x", "--lambda", "0+0i", "--order", "3"],
        &["expand", "--fn", "x", "--lambda", "1+2j", "--order", "3"],
        &["expand", "--fn", "x +", "--lambda", "1", "--order", "3"],
        &["expand", "--fn", "x1*x2", "--dims", "2", "--x0", "0", "--lambda", "1", "--order", "3"],
        &["eval", "--fn", "x", "--lambda", "1", "--x", "0.1", "--order", "0"],
        &["sweep", "--fn", "x", "--lambda", "1", "--order", "3"],
        &["identities", "--tol", "no_such_identity=1"],
        &["growth", "--fn", "cos(2*pi*x)", "--period", "-1"],
    ];
    for args in cases {
        let out = call(args);
        assert_eq!(out.code, exit::VALIDATION, "{args:?}: {}", out.stderr);
    }
}

#[test]
fn eval_reports() {
    let out = call(&["eval", "--fn", "exp(x)", "--lambda", "1+0i", "--x0", "0", "--x", "0.3", "--order", "5", "--check", "--format", "json"]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["reconstruction_error"].as_f64().unwrap() <= 1e-9);

    let same = call(&["eval", "--fn", "cos(2*pi*x)", "--lambda", TWO_PI_I, "--x", "0", "--order", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&same.stdout).unwrap();
    assert_eq!(v["abs_error"].as_f64().unwrap(), 0.0);
    assert_eq!(v["remainder"]["re"].as_f64().unwrap(), 0.0);

    let dom = call(&["eval", "--fn", "log(x)", "--lambda", "1+0i", "--x0", "1", "--x", "-1", "--order", "4"]);
    assert_eq!(dom.code, exit::DOMAIN);
    assert!(dom.stderr.contains("domain"));

    let bad = call(&["eval", "--fn", "sin(x)+x^3", "--lambda", "1+0i", "--x", "0.3", "--order", "8", "--quad-nodes", "2", "--check"]);
    assert_eq!(bad.code, exit::CHECK_FAILED);
    assert!(!bad.stdout.is_empty());
}

#[test]
fn order_sweep_decreases() {
    let out = call(&["sweep", "--fn", "cos(2*pi*x)", "--lambda", TWO_PI_I, "--n-range", "2:30", "--x", "0.1"]);
    assert_eq!(out.code, exit::OK);
    assert!(out.stdout.starts_with("N,abs_error,bound_tight,bound_loose\n"));
    let errs: Vec<f64> = csv_rows(&out.stdout).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(errs.len(), 29);
    // rows start at N = 2; beyond N = 4 every step shrinks until the float floor
    for w in errs[3..].windows(2) {
        assert!(w[1] < w[0] || w[0] < 1e-14, "{w:?}");
    }
}

#[test]
fn x_sweep_respects_bound() {
    let out = call(&["sweep", "--fn", "cos(2*pi*x)", "--lambda", TWO_PI_I, "--x-range=-0.15:0.15:13", "--order", "20"]);
    assert_eq!(out.code, exit::OK);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 13);
    for r in rows {
        let err: f64 = r[1].parse().unwrap();
        let tight: f64 = r[2].parse().unwrap();
        assert!(err <= tight, "{r:?}");
    }
    let single = call(&["sweep", "--fn", "x", "--lambda", TWO_PI_I, "--x-range", "0.1:0.2:1", "--order", "5"]);
    assert_eq!(csv_rows(&single.stdout).len(), 1);
}

#[test]
fn radius_of_cosine() {
    let out = call(&["radius", "--fn", "cos(2*pi*x)", "--lambda", TWO_PI_I, "--format", "json"]);
    assert_eq!(out.code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!((v["r_estimate"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!((v["x_region_halfwidth"].as_f64().unwrap() - 1.0 / 6.0).abs() < 0.01);
}

#[test]
fn growth_of_cosine() {
    let out = call(&["growth", "--fn", "cos(2*pi*x)", "--period", "1", "--format", "json"]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["k"], 0);
    assert!(v["bounded"].as_bool().unwrap());
}

#[test]
fn nd_product_coefficient() {
    let out = call(&["nd", "--fn", "x1*x2", "--dims", "2", "--lambda", TWO_PI_I, "--order", "4", "--format", "json"]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let c11 = v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["index"] == serde_json::json!([1, 1]))
        .unwrap();
    assert!((c11["re"].as_f64().unwrap() + 1.0 / (4.0 * PI * PI)).abs() < 1e-14);
    assert!(c11["im"].as_f64().unwrap().abs() < 1e-14);

    let checked = call(&[
        "nd", "--fn", "cos(2*pi*x1)*cos(2*pi*x2)", "--dims", "2", "--lambda", TWO_PI_I, "--order", "8",
        "--x", "0.05,0.05", "--check", "--format", "json",
    ]);
    assert_eq!(checked.code, exit::OK, "{}", checked.stderr);
    let v: serde_json::Value = serde_json::from_str(&checked.stdout).unwrap();
    assert!(v["evaluation"]["abs_error"].as_f64().unwrap() <= v["evaluation"]["bound"].as_f64().unwrap());
}

#[test]
fn identities_suite_and_filters() {
    let all = call(&["identities", "--suite", "all", "--format", "json"]);
    assert_eq!(all.code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&all.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.iter().all(|e| e["passed"] == true));

    let logs = call(&["identities", "--suite", "log", "--format", "csv"]);
    let rows = csv_rows(&logs.stdout);
    assert!(!rows.is_empty() && rows.iter().all(|r| r[0].starts_with("log_")));

    let strict = call(&["identities", "--tol", "log_k2=1e-30"]);
    assert_eq!(strict.code, exit::CHECK_FAILED);
    assert!(strict.stdout.contains("1 failed"));
    assert!(strict.stderr.contains("log_k2"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.json");
    let args = ["expand", "--fn", "x^2", "--lambda", "1", "--order", "4", "--format", "json", "--out"];
    let out = call(&[&args[..], &[path.to_str().unwrap()]].concat());
    assert_eq!(out.code, exit::OK);
    assert!(out.stdout.is_empty());
    let direct = call(&args[..args.len() - 1]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.stdout);

    let missing = dir.path().join("no/such/dir/out.csv");
    let failed = call(&[&args[..], &[missing.to_str().unwrap()]].concat());
    assert_eq!(failed.code, exit::VALIDATION);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["nd", "--fn", "exp(x1)*sin(x2)", "--dims", "2", "--lambda", "1", "--order", "5", "--x", "0.1,0.2", "--seed", "7"];
    assert_eq!(call(&args), call(&args));
}
