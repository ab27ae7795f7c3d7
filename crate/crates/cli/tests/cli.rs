use std::process::{Command, Output};

use serde_json::Value;

fn repgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repgrowth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn sl2_primes_abscissa() {
    let v = json_of(&repgrowth(&["abscissa", "--example", "sl2-primes", "--d", "3"]));
    assert_eq!(v["abscissa"], "5");
}

#[test]
fn fixed_construction_round_trips() {
    let out = repgrowth(&["construct", "fixed", "--rho", "3/2", "--family", "A", "--rank", "2", "--p", "5"]);
    let spec = json_of(&out).to_string();
    let v = json_of(&repgrowth(&["abscissa", "--spec", &spec]));
    assert_eq!(v["abscissa"], "3/2");
}

#[test]
fn psl2_7_csv() {
    let out = repgrowth(&["zeta", "--group", "PSL2", "--q", "7", "--N", "8", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "dimension,multiplicity\n1,1\n3,2\n6,1\n7,1\n8,1\n"
    );
}

#[test]
fn rejections_have_stable_exit_codes() {
    let tits = repgrowth(&["zeta", "--spec", r#"{"strata":[{"index":"finite","factors":[{"q":2}]}]}"#, "--N", "8"]);
    assert_eq!(tits.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tits.stderr).contains("Tits"));

    let pairs = r#"{"strata":[{"index":"finite","factors":[{"q":5,"pairs":[[2,1]]}]}]}"#;
    let bad = repgrowth(&["zeta", "--spec", pairs, "--N", "8"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("/pairs"));

    let below = repgrowth(&["construct", "fixed", "--rho", "1/2", "--family", "A", "--rank", "1", "--p", "5"]);
    assert_eq!(below.status.code(), Some(3));

    let budget = repgrowth(&["construct", "diagonal", "--rho", "2", "--budget", "100"]);
    assert_eq!(budget.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["zeta", "--example", "sl2-primes", "--d", "3", "--N", "30"];
    assert_eq!(repgrowth(&args).stdout, repgrowth(&args).stdout);
}

#[test]
fn gens_and_prg() {
    let v = json_of(&repgrowth(&["gens", "--group", "A5", "--max-d", "2", "--k", "60"]));
    assert_eq!(v["phi"]["2"], "2280");
    assert_eq!(v["aut"], 120);
    assert_eq!(v["power"]["d"], 3);
    let v = json_of(&repgrowth(&["prg", "--example", "sl2-primes", "--d", "4"]));
    assert_eq!(v["verdict"], "PRG");
}

#[test]
fn diagonal_certificate() {
    let v = json_of(&repgrowth(&["construct", "diagonal", "--rho", "2", "--stages", "2"]));
    assert_eq!(v["abscissa"], "2");
    let stages = v["certificate"]["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 2);
    for s in stages {
        for c in s["checks"].as_array().unwrap() {
            assert_eq!(c["status"], "pass");
        }
    }
}

#[test]
fn check_suite_passes() {
    let out = repgrowth(&["check"]);
    assert_eq!(json_of(&out)["pass"], true);
}

#[test]
fn writes_output_file() {
    let path = std::env::temp_dir().join(format!("repgrowth-cli-{}.json", std::process::id()));
    let out = repgrowth(&["prg", "--example", "sl2-primes", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["exponent"], "4");
    std::fs::remove_file(path).unwrap();
}
