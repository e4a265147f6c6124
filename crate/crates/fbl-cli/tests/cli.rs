// SPDX-License-Identifier: Apache-2.0
// The `fbl` binary: exit codes, report schemas, determinism.

use fbl_core::dueck::DueckReport;
use fbl_core::exponents::{l_star, ExponentResult};
use fbl_core::regions::ConditionReport;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbl")).args(args).output().expect("run fbl")
}

fn ok(args: &[&str]) -> String {
    let o = fbl(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn exponent_report() {
    let s = ok(&["exponent", "--channel", "bsc:0.1", "--rate", "0.1", "--pu", "uniform"]);
    let r: ExponentResult = serde_json::from_str(&s).unwrap();
    // Primal oracle value at grid 1e-3, rounded to the report precision.
    assert!((r.value - 0.123143551314).abs() < 1e-3);
    assert!(r.converged);
    let p = ok(&["exponent", "--channel", "bsc:0.1", "--rate", "0.1", "--primal", "--grid-step", "0.001"]);
    let p: ExponentResult = serde_json::from_str(&p).unwrap();
    assert!((p.value - r.value).abs() < 1e-3);
}

#[test]
fn dueck_stats_report() {
    let s = ok(&["dueck", "stats", "--a", "2", "--k", "2", "--eta", "6"]);
    let r: DueckReport = serde_json::from_str(&s).unwrap();
    assert!((r.stats.xi.to_f64() - 1.0 / 8192.0).abs() < 1e-15);
    assert!((r.stats.log_a - 2f64.ln()).abs() < 1e-11);
}

#[test]
fn floats_have_at_most_twelve_significant_digits() {
    let s = ok(&["dueck", "stats", "--a", "3", "--k", "2"]);
    fn walk(v: &Value) {
        match v {
            Value::Number(n) if n.is_f64() => {
                let t = n.to_string();
                let mant = t.split(['e', 'E']).next().unwrap();
                let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
                let digits = digits.trim_start_matches('0');
                assert!(digits.len() <= 12, "{t}");
            }
            Value::Array(a) => a.iter().for_each(walk),
            Value::Object(o) => o.values().for_each(walk),
            _ => {}
        }
    }
    walk(&serde_json::from_str(&s).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(fbl(&["check", "mac1", "--config", "missing.json"]).status.code(), Some(2));
    assert_eq!(fbl(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fbl(&["exponent", "--channel", "bsc:0.1"]).status.code(), Some(2));
    assert_eq!(fbl(&["exponent", "--channel", "bsc:0.1", "--rate", "0.1", "--bogus"]).status.code(), Some(2));
    assert_eq!(fbl(&["check", "isolated", "--a", "2", "--k", "2"]).status.code(), Some(0));
    assert_eq!(fbl(&["check", "isolated", "--a", "2", "--k", "2", "--strict"]).status.code(), Some(1));
    assert_eq!(fbl(&["check", "isolated", "--a", "1048576", "--k", "48", "--strict"]).status.code(), Some(0));
    assert_eq!(fbl(&["scan", "--amax", "64", "--kmax", "4", "--strict"]).status.code(), Some(1));
    assert_eq!(fbl(&["simulate", "ic2", "--toy", "gkw-noiseless", "--trials", "2"]).status.code(), Some(2));
    assert_eq!(fbl(&["simulate", "mac1", "--toy", "nope"]).status.code(), Some(2));
    assert_eq!(fbl(&["info", "--format", "csv", "--pmf", "0.5,0.5"]).status.code(), Some(2));
}

#[test]
fn malformed_config_names_the_field() {
    let p = tmp("bad_params.json");
    std::fs::write(&p, r#"{"assignment": {}, "params": {"alpha": 1.0}}"#).unwrap();
    let o = fbl(&["check", "mac1", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("missing field"), "{err}");

    std::fs::write(&p, r#"{"a": 2, "k": 2, "colour": 1}"#).unwrap();
    let o = fbl(&["check", "isolated", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

/// The GKW toy as a `check` config with `l` raised past `l*`.
fn gkw_check_config(name: &str, ny: f64, file: &str) -> PathBuf {
    let mut v: Value = serde_json::from_str(&ok(&["toy", name, "--check"])).unwrap();
    let rho = v["params"]["rho"].as_f64().unwrap();
    let l = l_star(rho, 4.0, ny).unwrap() as u64;
    v["params"]["l"] = Value::from(l.div_ceil(4) * 4);
    v["params"]["delta"] = Value::from(0.1);
    let p = tmp(file);
    std::fs::write(&p, serde_json::to_string(&v).unwrap()).unwrap();
    p
}

#[test]
fn check_reports_reparse() {
    let mac = gkw_check_config("gkw-noiseless", 80.0, "gkw_mac.json");
    let ic = gkw_check_config("gkw-noiseless-ic", 20.0, "gkw_ic.json");
    for (kind, cfg) in [("mac1", &mac), ("mac2", &mac), ("ic1", &ic), ("ic2", &ic)] {
        let s = ok(&["check", kind, "--config", cfg.to_str().unwrap()]);
        let r: ConditionReport = serde_json::from_str(&s).unwrap();
        assert!(!r.inequalities.is_empty(), "{kind}");
        assert_eq!(r.overall, r.inequalities.iter().all(|i| i.satisfied)
            && r.phi.iter().all(|p| p.below_half)
            && r.checks.iter().all(|c| c.passed), "{kind}");
        // Re-emitting the parsed report gives the same text.
        let again = serde_json::to_string_pretty(&serde_json::to_value(&r).unwrap()).unwrap() + "\n";
        let a: Value = serde_json::from_str(&again).unwrap();
        let b: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b, "{kind}");
    }
    // The chk variant needs W alphabets the toy does not have.
    assert_eq!(fbl(&["check", "chk", "--config", ic.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn simulate_writes_trial_csv() {
    let csv = tmp("trials.csv");
    let s = ok(&["simulate", "mac1", "--toy", "gkw-noiseless", "--m", "16", "--trials", "20", "--trials-csv", csv.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["variant"], "mac1");
    assert_eq!(v["summary"]["trials"], 20);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("trial,seed,"));
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
    assert_eq!(ok(&["simulate", "mac1", "--toy", "gkw-noiseless", "--m", "16", "--trials", "20", "--format", "csv"]), text);
}

#[test]
fn toy_spec_round_trips_through_simulate() {
    let p = tmp("adder.json");
    std::fs::write(&p, ok(&["toy", "binary-adder", "--m", "8"])).unwrap();
    let a = ok(&["simulate", "mac1", "--config", p.to_str().unwrap(), "--trials", "10"]);
    let b = ok(&["simulate", "mac1", "--toy", "binary-adder", "--m", "8", "--trials", "10"]);
    assert_eq!(a, b);
}

#[test]
fn info_on_a_joint() {
    let p = tmp("joint.json");
    std::fs::write(&p, r#"{"joint": {"factors": [[0, 1], [0, 1]], "probs": [0.5, 0.0, 0.0, 0.5]}}"#).unwrap();
    let v: Value = serde_json::from_str(&ok(&["info", "--config", p.to_str().unwrap()])).unwrap();
    let ln2 = 0.693147180560;
    assert!((v["joint"]["entropy"].as_f64().unwrap() - ln2).abs() < 1e-11);
    assert!((v["joint"]["mutual_information"][0]["value"].as_f64().unwrap() - ln2).abs() < 1e-11);
    assert!((v["joint"]["gkw"]["entropy_k"].as_f64().unwrap() - ln2).abs() < 1e-11);
    assert_eq!(v["joint"]["gkw"]["part"]["k_size"], 2);
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        &["simulate", "ic2", "--toy", "gkw-noiseless-ic", "--m", "16", "--trials", "50"][..],
        &["verify", "rows", "--toy", "binary-adder", "--m", "100", "--trials", "20"][..],
        &["scan", "--amax", "4096", "--kmax", "8", "--format", "csv"][..],
    ] {
        let one = ok(&[&["--threads", "1"][..], args].concat());
        let four = ok(&[&["--threads", "4"][..], args].concat());
        assert_eq!(one, four, "{args:?}");
    }
}
