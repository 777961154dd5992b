use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jordan-aut"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out: Output = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

#[test]
fn verify_catalog_systems() {
    for spec in ["VIV(n=2,ring=F5)", "Mplus(2,F3)", "VhI(1,2,F3)", "TIV(3,Q)"] {
        let (code, out) = run(&["verify", spec]);
        assert_eq!(code, 0, "{spec}: {out}");
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn verify_bad_fixture_fails() {
    let (code, out) = run(&["verify", &fixture("bad_triple.json")]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["violation"]["axiom"], "d-commutator");
}

#[test]
fn verify_parse_error_is_usage() {
    let (code, out) = run(&["verify", "Nope(2,F3)"]);
    assert_eq!(code, 2);
    assert!(json(&out)["error"].is_string());
    let (code, _) = run(&["verify", "VIV(2,F4)"]);
    assert_eq!(code, 2);
}

#[test]
fn check_claims() {
    let (code, out) = run(&["check", "autV-IV", "--ring", "F5", "--n", "2"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["details"]["comparison"]["equal"], true);

    let (code, out) = run(&["check", "vhi-rect", "--ring", "F3", "--m", "1", "--n", "2"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["details"]["comparison"]["order_a"], 48);
    assert_eq!(v["details"]["comparison"]["equal"], true);

    let (code, out) = run(&["check", "lambda-iso", "--ring", "F3", "--n", "2"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["error"], "NoSquareRootOfMinusOne");

    let (code, out) = run(&["check", "no-such-claim"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "UnknownClaim");
}

#[test]
fn claim_list() {
    let (code, out) = run(&["claims"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out).as_array().unwrap().len(), 15);
}

#[test]
fn enumerate_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("that.json");
    let (code, out) = run(&["enumerate", "ThatIV(2,F3)", "--mode", "exhaustive", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let v = json(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(v["order"], 8);
    assert_eq!(v["mode"], "exhaustive");
    assert!(v.get("elements").is_none());
}

#[test]
fn enumerate_generated_vhi_square() {
    let (code, out) = run(&["enumerate", "VhI(2,2,F3)", "--mode", "generated"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["order"], 2304);
}

#[test]
fn enumerate_errors() {
    let (code, out) = run(&["enumerate", "VIV(2,Q)"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "NonEnumerableRing");

    let (code, out) = run(&["enumerate", "VhI(2,2,F3)", "--budget", "1000"]);
    assert_eq!(code, 3);
    assert_eq!(json(&out)["error"], "BudgetExceeded");

    let (code, _) = run(&["enumerate", "VIV(2,F3)", "--mode", "sideways"]);
    assert_eq!(code, 2);
}

#[test]
fn enumerate_is_byte_identical_across_jobs() {
    for spec in ["VIV(2,F5)", "TtI(2,2,F3)", "VhI(1,2,F5)"] {
        let (_, a) = run(&["enumerate", spec, "--dump-elements", "--jobs", "1"]);
        let (_, b) = run(&["enumerate", spec, "--dump-elements", "--jobs", "4"]);
        assert_eq!(a, b, "{spec}");
        assert!(json(&a)["elements"].as_array().unwrap().len() > 1);
    }
}

#[test]
fn custom_file_enumerates() {
    let (code, out) = run(&["enumerate", &fixture("scalar_triple.json")]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["order"], 2);
}

#[test]
fn pretty_output_is_text() {
    let (code, out) = run(&["--pretty", "verify", "Mplus(2,F3)"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("passed") && l.ends_with("true")));
    assert!(serde_json::from_str::<Value>(&out).is_err());
}

#[test]
fn usage_errors_exit_two() {
    let (code, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["check"]);
    assert_eq!(code, 2);
}
