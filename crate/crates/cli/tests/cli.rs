use std::process::{Command, Output};

use serde_json::Value;

fn qmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeas")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = qmeas(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn value(v: &Value, name: &str) -> f64 {
    v["values"][name].as_f64().unwrap_or_else(|| panic!("missing {name}"))
}

#[test]
fn same_seed_same_bytes() {
    for scenario in ["ifm", "helstrom", "naimark"] {
        let a = qmeas(&["run", scenario, "--seed", "7"]);
        let b = qmeas(&["run", scenario, "--seed", "7"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{scenario}");
    }
    let a = qmeas(&["run", "ifm", "--seed", "7", "--format", "csv"]);
    let c = qmeas(&["run", "ifm", "--seed", "8", "--format", "csv"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn hardy_dark_coincidence() {
    let v = run_json(&["run", "hardy"]);
    assert!((value(&v, "p_joint_dark") - 0.0625).abs() < 1e-12);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn three_box_weak_values() {
    let v = run_json(&["run", "three-box"]);
    for (name, want) in [("weak_a_prime", 1.0), ("weak_b_ext", 1.0), ("weak_c_prime", -1.0)] {
        assert!((value(&v, name) - want).abs() < 1e-12, "{name}");
    }
}

#[test]
fn coin_without_data() {
    let v = run_json(&["run", "coin", "--param", "heads=0", "--param", "tosses=0"]);
    assert_eq!(value(&v, "mean_flat"), 0.5);
    assert!(v["values"]["mle"].is_null());
}

#[test]
fn every_expected_entry_is_tagged() {
    let v = run_json(&["run", "usd"]);
    let expected = v["expected"].as_object().unwrap();
    assert!(!expected.is_empty());
    for (name, e) in expected {
        let tag = e["provenance"].as_str().unwrap();
        assert!(["reference", "derived", "trivial"].contains(&tag), "{name}: {tag}");
        assert!(e["tolerance"].is_number());
    }
}

#[test]
fn list_has_fourteen_anchored_scenarios() {
    let v = run_json(&["list", "--format", "json"]);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 14);
    for s in list {
        assert!(!s["anchors"].as_array().unwrap().is_empty(), "{}", s["name"]);
        assert!(s["params"].is_array());
    }
    let text = qmeas(&["list"]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("weak-pointer"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qmeas(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(qmeas(&["run", "coin", "--param", "nope=1"]).status.code(), Some(2));
    assert_eq!(qmeas(&["run", "coin", "--param", "heads"]).status.code(), Some(2));
    assert_eq!(qmeas(&["run", "coin", "--param", "heads=-1"]).status.code(), Some(2));
    assert_eq!(qmeas(&["run", "coin", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qmeas(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    // strong coupling leaves the linear-response regime
    let out = qmeas(&["run", "weak-pointer", "--param", "g=1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shift_ratio_x_1"));
}

#[test]
fn csv_is_the_values_table() {
    let out = qmeas(&["run", "disease", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value"));
    let row = lines.find(|l| l.starts_with("p_healthy_given_positive,")).unwrap();
    let p: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((p - 0.99).abs() < 1e-3);
}

#[test]
fn out_path_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"heads": 2, "tosses": 10, "seed": 5}"#).unwrap();
    let out = dir.path().join("r.json");
    let status = qmeas(&[
        "run",
        "coin",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "tosses=4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["params"]["heads"], 2);
    assert_eq!(v["params"]["tosses"], 4);
    assert_eq!(v["seed"], 5);
    assert!((value(&v, "mean_flat") - 0.5).abs() < 1e-12);

    let with_flag = run_json(&["run", "coin", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(with_flag["seed"], 9);
}

#[test]
fn curves_are_column_pairs() {
    let v = run_json(&["run", "eraser"]);
    let curves = v["curves"].as_array().unwrap();
    assert!(curves.len() >= 2);
    for c in curves {
        assert_eq!(c["x"].as_array().unwrap().len(), c["y"].as_array().unwrap().len());
    }
}

#[test]
fn verify_passes() {
    let out = qmeas(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 14);
}
