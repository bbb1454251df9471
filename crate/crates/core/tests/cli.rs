use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jordan")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn check_degeneracy_verdicts() {
    let v = ok_json(&["check-degeneracy", "catalog:canonical", "--samples", "100"]);
    assert!(v["lindeg_sup"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["verdict"], "linearly degenerate");
    assert_eq!(v["equivalent"], true);
    let v = ok_json(&["check-degeneracy", "catalog:counterexample"]);
    assert_eq!(v["verdict"], "not linearly degenerate");
    assert_eq!(v["block_degeneracy_sup"], 1.0);
    let v = ok_json(&["check-degeneracy", &data("hardrod.json")]);
    assert_eq!(v["verdict"], "linearly degenerate");
}

#[test]
fn derive_phi_tables() {
    let v = ok_json(&["derive-phi", "catalog:canonical", "--f1", "1"]);
    let u1 = v["u1"].as_array().unwrap();
    let u2 = v["u2"].as_array().unwrap();
    assert_eq!(u1.len(), 10);
    for (i, a) in u1.iter().enumerate() {
        for (j, b) in u2.iter().enumerate() {
            let phi = v["phi"][i][j].as_f64().unwrap();
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((phi - a.exp()).abs() < 1e-12 * a.exp());
            let _ = b;
        }
    }
    let v = ok_json(&["derive-phi", "catalog:canonical", "--f1", "u2"]);
    let (a, b) = (v["u1"][3].as_f64().unwrap(), v["u2"][7].as_f64().unwrap());
    assert!((v["phi"][3][7].as_f64().unwrap() - b * a.exp()).abs() < 1e-11);
    assert_eq!(v["field"]["kind"], "closed-form-phi");
    assert_eq!(code(&["derive-phi", "catalog:counterexample"]), 4);
}

#[test]
fn solve_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fields.csv");
    let o = run(&["solve", "fixture:canonical2", "--grid", "0,2,5,0,0.9,3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().find(|l| l.starts_with("1.0000000000000000e0,4.5000000000000001e-1")).unwrap();
    assert!(row.contains(",ok,"));
    let o = run(&["solve", "fixture:canonical2", "--grid", "1,1,1,0.5,0.5,1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",2.0000000000000000e0"));
    let o = run(&["solve", "fixture:canonical2", "--grid", "0,2,3,1.2,1.5,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("broken"));
    assert_eq!(code(&["solve", "fixture:canonical2", "--grid", "0,2,0,0,0.9,3"]), 2);
}

#[test]
fn verify_reports() {
    let v = ok_json(&["verify", "fixture:canonical2", "--variant", "paper", "--grid", "0.2,0.8,4,0.1,0.5,3"]);
    assert_eq!(v["verdict"], "pass");
    for e in v["per_equation"].as_array().unwrap() {
        assert!((e["order"].as_f64().unwrap() - 2.0).abs() < 0.1);
    }
    let v = ok_json(&["verify", "fixture:wdvv-t", "--grid", "0.2,0.8,4,0.1,0.4,3"]);
    assert_eq!(v["winner"], "rederived");
    assert!(!v["failed_printed_formulas"].as_array().unwrap().is_empty());
    assert_eq!(code(&["verify", "/no/such/family.json"]), 2);
}

#[test]
fn hamiltonian_report() {
    let v = ok_json(&["hamiltonian", "catalog:canonical", "--f1", "1"]);
    assert_eq!(v["r_sym_max"], 0.0);
    assert!(v["r_cov_max"].as_f64().unwrap() < 1e-9);
    assert!(v["flatness_max"].as_f64().unwrap() < 1e-6);
    assert!(v["theta_phi_max"].as_f64().unwrap() < 1e-12);
    assert_eq!(code(&["hamiltonian", "catalog:counterexample"]), 4);
    assert_eq!(code(&["hamiltonian", "catalog:canonical", "--f1", "0"]), 4);
}

#[test]
fn compat_reports() {
    let v = ok_json(&["compat", "catalog:canonical", &data("canonical_phi.json")]);
    assert!(v["residual_2x2_sup"][1].as_f64().unwrap() < 1e-10);
    let v = ok_json(&["compat", &data("hardrod.json"), &data("hardrod_case1.json"), "--box", "0.5,2"]);
    let r = v["hardrod_f_residual_sup"].as_array().unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|x| x.as_f64().unwrap() < 1e-10));
    assert!(v["block_residual_sup"].as_array().unwrap().len() == 6);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["check-degeneracy", "catalog:canonical", "--bogus"]), 2);
    assert_eq!(code(&["check-degeneracy", "catalog:nope"]), 2);
    assert_eq!(code(&["derive-phi", "catalog:canonical", "--f1", "u2 +"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn outputs_are_deterministic() {
    let cases: Vec<Vec<String>> = vec![
        vec!["check-degeneracy".into(), "catalog:wdvv-s".into(), "--seed".into(), "7".into()],
        vec!["derive-phi".into(), "catalog:canonical".into(), "--f1".into(), "1 + u2^2".into()],
        vec!["solve".into(), "fixture:hardrod2".into(), "--grid".into(), "0,1,6,0,0.3,4".into()],
        vec!["verify".into(), "fixture:canonical2".into(), "--grid".into(), "0.2,0.8,3,0.1,0.3,2".into()],
        vec!["hamiltonian".into(), "catalog:canonical".into(), "--seed".into(), "3".into(), "--samples".into(), "20".into()],
        vec!["compat".into(), data("hardrod.json"), data("hardrod_case1.json"), "--seed".into(), "5".into()],
    ];
    for c in cases {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["check-degeneracy", "catalog:wdvv-s", "--seed", "1"]).stdout;
    let b = run(&["check-degeneracy", "catalog:wdvv-s", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}
