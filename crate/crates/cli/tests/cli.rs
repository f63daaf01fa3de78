use std::process::{Command, Output};

use serde_json::Value;

fn solkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn invariants_of_the_normalized_sphere() {
    let out = solkit(&[
        "invariants", "--metric", "round_s4", "--param", "r=2.449489743", "--nodes", "24",
        "--refinement", "1", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!((doc["report"]["chi"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-4);
    assert!(doc["report"]["tau"]["value"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(doc["matches_reference"], Value::Bool(true));
}

#[test]
fn k3_is_obstructed() {
    let out = solkit(&["obstruct", "--sum", "K3", "--structure", "shrinking_soliton"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert_eq!(doc["obstructed"], Value::Bool(true));
    let rules = doc["rules"].as_array().unwrap();
    assert!(rules
        .iter()
        .any(|r| r["rule"] == "spin_forces_zero_signature" && r["verdict"] == "fail"));
}

#[test]
fn wang_zhu_is_allowed() {
    let out = solkit(&["obstruct", "--sum", "CP2 + 2*CP2bar", "--structure", "kahler_shrinking_soliton"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["classification"], "Wang-Zhu soliton");
}

#[test]
fn gaussian_soliton_check() {
    let out = solkit(&["soliton-check", "--metric", "gaussian_shrinker", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["residual"]["max_norm"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["identities"]["pass"], Value::Bool(true));
    assert_eq!(doc["verdict"], "pass");
}

#[test]
fn wrong_candidate_fails_soliton_check() {
    let out = solkit(&[
        "soliton-check", "--metric", "product_s2xs2", "--param", "a=1.4142135623730951",
        "--param", "b=1", "--rho", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert!((doc["identities"]["trace"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(doc["sufficient"], Value::Null);
}

#[test]
fn unnormalized_sphere_is_rescaled_for_integrals() {
    let out = solkit(&[
        "soliton-check", "--metric", "round_s4", "--param", "r=1", "--nodes", "8", "--refinement", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["rho"].as_f64(), Some(3.0));
    assert_eq!(doc["sufficient"]["thm44"]["verdict"], "pass");
}

#[test]
fn topology_commands() {
    let out = solkit(&["ht", "--sum", "CP2 + 12*CP2bar"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["ht"]["two_chi_minus_three_abs_tau"], -3);
    let out = solkit(&["ht", "--sum", "K3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ht"]["minus"], "boundary");
    let out = solkit(&["freedman", "--left", "CP2 + CP2bar", "--right", "S2xS2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["equivalent"], Value::Bool(false));
    let out = solkit(&["freedman", "--left", "K3", "--right", "K3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn zoo_listing() {
    let out = solkit(&["zoo", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap().to_string())
        .collect();
    for n in ["round_s4", "fubini_study_cp2", "product_s2xs2", "flat_t4", "gaussian_shrinker", "koiso_cao", "wang_zhu"] {
        assert!(names.iter().any(|m| m == n), "{n}");
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["bogus"],
        vec!["obstruct", "--sum", "K3", "--structure", "hyperbolic"],
        vec!["invariants", "--metric", "round_s4", "--param", "r"],
        vec!["ht"],
    ] {
        let out = solkit(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn evaluation_errors_exit_one() {
    for args in [
        vec!["freedman", "--left", "T4", "--right", "S4"],
        vec!["ht", "--sum", "CP3"],
        vec!["invariants", "--metric", "gaussian_shrinker", "--nodes", "4"],
        vec!["invariants", "--metric", "koiso_cao"],
        vec!["invariants", "--metric", "round_s4", "--param", "r=-1"],
        vec!["soliton-check", "--metric", "flat_t4"],
    ] {
        let out = solkit(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn output_is_byte_identical_and_flag_order_free() {
    let a = solkit(&[
        "invariants", "--metric", "fubini_study_cp2", "--nodes", "8", "--refinement", "2", "--tol", "1e-6",
    ]);
    let b = solkit(&[
        "invariants", "--tol", "1e-6", "--refinement", "2", "--nodes", "8", "--metric", "fubini_study_cp2",
    ]);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let c = solkit(&["soliton-check", "--metric", "round_s4", "--nodes", "6", "--refinement", "1"]);
    let d = solkit(&["soliton-check", "--refinement", "1", "--nodes", "6", "--metric", "round_s4"]);
    assert_eq!(c.stdout, d.stdout);
    let e = solkit(&["obstruct", "--structure", "einstein", "--sum", "CP2 + 9*CP2bar"]);
    let f = solkit(&["obstruct", "--sum", "CP2 + 9*CP2bar", "--structure", "einstein"]);
    assert_eq!(e.stdout, f.stdout);
}
