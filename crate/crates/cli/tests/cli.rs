use serde_json::Value;
use std::process::{Command, Output};

fn ellsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellsel")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_identity_one_passes() {
    let out = ellsel(&["verify", "--identity", "1", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["pass"], Value::Bool(true));
    assert_eq!(v["result"]["reports"][0]["name"], "identity-1/p=1");
    assert_eq!(v["config"]["cli"]["command"]["subcommand"], "verify");
    assert_eq!(v["config"]["resolved"]["grid"].as_array().unwrap().len(), 6);
}

#[test]
fn series_by_lemma_label() {
    let out = ellsel(&["series", "--lemma", "7.5", "--order", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["reports"][0]["name"], "theta6-eta");
    assert_eq!(v["result"]["reports"][0]["pass"], Value::Bool(true));
}

#[test]
fn smatrix_level_three() {
    let out = ellsel(&["smatrix", "--p", "0", "--kappa", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["dim"], 2);
    assert_eq!(v["result"]["S"]["rows"].as_array().unwrap().len(), 2);
    assert!(v["result"]["max_relation_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["verify", "--identity", "4", "--tau", "0+0.6i", "--grid", "0.2,0.5"];
    assert_eq!(ellsel(&args).stdout, ellsel(&args).stdout);
}

#[test]
fn csv_columns() {
    let out = ellsel(&["verify", "--identity", "2", "--grid", "0.2,0.4", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("name,param-key,param-value,lhs_re,lhs_im,rhs_re,rhs_im,rel_err,pass")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn failing_verification_exits_one() {
    let out = ellsel(&["verify", "--identity", "1", "--p", "2", "--grid", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["pass"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ellsel(&["verify", "--tau", "0.3-0.1i"]).status.code(), Some(2));
    assert_eq!(ellsel(&["smatrix", "--p", "1", "--kappa", "3"]).status.code(), Some(2));
    assert_eq!(ellsel(&["verify", "--identity", "11"]).status.code(), Some(2));
    assert_eq!(ellsel(&["series", "--lemma", "9.9"]).status.code(), Some(2));
    assert_eq!(ellsel(&["bogus"]).status.code(), Some(2));
    assert_eq!(ellsel(&["smatrix", "--kappa", "4", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn eval_eta_cubed() {
    let v = json(&ellsel(&["eval", "--function", "eta", "--tau", "0.8i"]));
    let eta = v["result"]["value"][0].as_f64().unwrap();
    let d = json(&ellsel(&["eval", "--function", "theta1", "--tau", "0.8i", "--lambda", "0", "--d-lambda", "1"]));
    let d0 = d["result"]["value"][0].as_f64().unwrap();
    assert!((2.0 * std::f64::consts::PI * eta.powi(3) - d0).abs() < 1e-12 * d0);
}

#[test]
fn block_and_selberg_reports() {
    let v = json(&ellsel(&["block", "--p", "1", "--kappa", "4", "--n", "2"]));
    assert!(v["result"]["u"]["error_estimate"].as_f64().unwrap() < 1e-8);
    let out = ellsel(&["selberg", "--p", "1", "--alpha", "0.5", "--beta", "0.5", "--gamma", "0", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["result"]["rel_err"].as_f64().unwrap() < 1e-8);
}

#[test]
fn modular_numeric_matches() {
    let v = json(&ellsel(&["modular", "--p", "1", "--kappa", "4", "--numeric"]));
    assert!(v["result"]["numeric"]["max_abs_diff_S"].as_f64().unwrap() < 1e-4);
}

#[test]
fn suite_single_criterion() {
    let out = ellsel(&["suite", "--criterion", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("criterion 4: PASS"));
}
