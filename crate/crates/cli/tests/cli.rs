use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dforms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dforms"))
        .args(args)
        .env_remove("DFORMS_CAPS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn column(v: &Value, key: &str) -> Vec<Value> {
    v["rows"].as_array().unwrap().iter().map(|r| r[key].clone()).collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("dforms-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn dims_table() {
    let out = dforms(&["dims", "--q", "2", "--r", "2", "--k", "0..4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "drinfeld-forms/1");
    assert_eq!(v["status"], "pass");
    assert_eq!(column(&v, "oracle"), [1, 3, 5, 7, 9].map(Value::from));
    assert!(column(&v, "match").iter().all(|m| m == true));
}

#[test]
fn rank_one_dims_are_one() {
    let out = dforms(&["dims", "--q", "2", "--r", "1", "--k", "0..9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(column(&json(&out), "oracle").iter().all(|x| x == 1));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(dforms(&["dims", "--q", "0", "--r", "2"]).status.code(), Some(2));
    assert_eq!(dforms(&["dims", "--q", "6", "--r", "2"]).status.code(), Some(2));
    assert_eq!(dforms(&["dims", "--q", "2", "--k", "5..1"]).status.code(), Some(2));
    assert_eq!(dforms(&["invariants", "--q", "2", "--group", "file:/nonexistent/missing.txt"]).status.code(), Some(2));
    assert_eq!(dforms(&["invariants", "--q", "2", "--group", "borel"]).status.code(), Some(2));
    assert_eq!(dforms(&["hecke", "--q", "2", "--a", "0,1", "--b", "0,0,1"]).status.code(), Some(2));
}

#[test]
fn resource_caps_exit_two() {
    let out = dforms(&["hecke", "--q", "2", "--a", "0,1", "--b", "0,1", "--cap-group", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_dforms"))
        .args(["dims", "--q", "2", "--r", "3", "--k", "6"])
        .env("DFORMS_CAPS", "monomials=5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unipotent_invariants() {
    let out = dforms(&["invariants", "--q", "2", "--r", "2", "--group", "unipotent", "--k", "0..5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(column(&json(&out), "invariant_dim"), (1..=6).map(Value::from).collect::<Vec<_>>());
}

#[test]
fn special_linear_weights() {
    let out = dforms(&["invariants", "--q", "3", "--r", "2", "--group", "sl", "--k", "0..6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(column(&json(&out), "invariant_dim"), [1, 0, 1, 0, 2, 0, 2].map(Value::from));
}

#[test]
fn group_from_file() {
    // Index-2 subgroup of the unipotent group over F_4.
    let path = temp_file("half.txt", "4 2\n# generator\n1 1 0 1\n");
    let arg = format!("file:{}", path.display());
    let out = dforms(&["invariants", "--q", "4", "--r", "2", "--group", &arg, "--k", "0..3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["order"], 2);
    assert!(column(&v, "match").iter().all(|m| m == true));

    // Not unipotent: no closed formula, so the expectation is null.
    let path = temp_file("gl.txt", "3 2\n0 1 1 0\n2 0 0 1\n");
    let arg = format!("file:{}", path.display());
    let out = dforms(&["invariants", "--q", "3", "--r", "2", "--group", &arg, "--k", "0..2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(column(&json(&out), "expected").iter().all(Value::is_null));

    let bad = temp_file("bad.txt", "2 2\n1 1 0\n");
    let arg = format!("file:{}", bad.display());
    assert_eq!(dforms(&["invariants", "--q", "2", "--group", &arg]).status.code(), Some(2));
}

#[test]
fn universal_report() {
    let out = dforms(&["universal", "--q", "2", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(column(&v, "coefficient"), ["u_x + u_y + u_{x+y}", "u_x*u_y*u_{x+y}"].map(Value::from));
    assert!(v["checks"].as_object().unwrap().values().all(|f| f == true));
}

#[test]
fn strata_line() {
    let out = dforms(&["strata", "--q", "2", "--r", "2", "--subspace", "1 0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank"], 1);
    assert_eq!(column(&v, "coefficient"), ["u_x", "0"].map(Value::from));
    let out = dforms(&["strata", "--q", "2", "--r", "3", "--subspace", "1 0 1; 0 1 1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], 2);
}

#[test]
fn hecke_square() {
    let out = dforms(&["hecke", "--q", "2", "--r", "2", "--a", "0,1", "--b", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["oracle_match"], true);
    let product: Vec<(String, u64)> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["type"].as_str().unwrap().to_string(), r["mult"].as_u64().unwrap()))
        .collect();
    assert_eq!(product, [("(0,2)".to_string(), 1), ("(1,1)".to_string(), 3)]);
}

#[test]
fn csv_mirrors_rows() {
    let out = dforms(&["dims", "--q", "3", "--r", "2", "--k", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,oracle,formula,match\n2,7,7,true\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--seed", "7"];
    let (a, b) = (dforms(&args), dforms(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
}
