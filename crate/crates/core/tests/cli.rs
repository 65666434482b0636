use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conebessel"))
        .args(args)
        .env_remove("CONEBESSEL_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_j_prints_json_with_seventeen_digits() {
    let out = cli(&["eval-j", "--rank", "2", "--j", "1", "--nu", "0.3", "--t", "0,0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("\"value\":1.0000000000000000e0"), "{text}");
    assert_eq!(json(&out)["value"], 1.0);
}

#[test]
fn t_and_x_agree() {
    let a = json(&cli(&["eval-k-series", "--rank", "2", "--nu", "-0.7", "--x", "0.3,0.2", "--json"]));
    let b = json(&cli(&["eval-k-series", "--rank", "2", "--nu", "-0.7", "--t", "0.5,0.06", "--json"]));
    let (a, b) = (a["value"].as_f64().unwrap(), b["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-12 * a);
    assert!((a - 0.901769151167929).abs() < 1e-10);
}

#[test]
fn coefficients_have_four_entries_per_side() {
    let v = json(&cli(&["coeffs", "--nu", "-1.7", "--d", "1", "--json"]));
    assert_eq!(v["a"].as_array().unwrap().len(), 4);
    assert_eq!(v["b"].as_array().unwrap().len(), 4);
}

#[test]
fn monte_carlo_seed_comes_from_the_environment() {
    let args = ["eval-k-mc", "--rank", "2", "--nu", "-0.7", "--x", "0.3,0.2", "--samples", "10000", "--json"];
    let default = json(&cli(&args));
    assert_eq!(default["seed"], 42);
    let env = Command::new(env!("CARGO_BIN_EXE_conebessel")).args(args).env("CONEBESSEL_SEED", "7").output().unwrap();
    assert_eq!(json(&env)["seed"], 7);
    assert_ne!(json(&env)["value"], default["value"]);
}

#[test]
fn exit_codes() {
    // Mutually exclusive point arguments.
    assert_eq!(cli(&["eval-j", "--rank", "2", "--j", "1", "--nu", "0.3", "--t", "1,2", "--x", "1,2"]).status.code(), Some(2));
    // Wrong number of coordinates.
    assert_eq!(cli(&["eval-j", "--rank", "3", "--j", "1", "--nu", "0.3", "--t", "1,2"]).status.code(), Some(2));
    // Pole of the order.
    let out = cli(&["eval-j", "--rank", "2", "--j", "1", "--nu", "-1", "--t", "0.1,0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-generic"));
    // Unknown check.
    let out = cli(&["verify", "--suite", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lemma1"));
}

#[test]
fn verify_named_checks() {
    let out = cli(&["verify", "--suite", "lemma1,coeffs-chain", "--seed", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], 2);
    assert_eq!(v["results"][0]["paper_anchor"], "Lemma 1");
    assert!(v["results"][0].get("wall_time").is_none());
    let listed = cli(&["verify", "--list"]);
    assert!(String::from_utf8_lossy(&listed.stdout).lines().any(|l| l == "theorem-interior-d2"));
}
