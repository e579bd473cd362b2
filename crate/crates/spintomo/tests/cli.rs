//! Black-box tests of the command-line interface: output formats, exit
//! codes, config-file merging, and determinism.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_spintomo"))
        .args(args)
        .output()
        .expect("run CLI");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn coeffs_header_and_row_count() {
    let (stdout, _, code) = run(&["coeffs", "--points", "10"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("kappa,a,a_prime,b,c"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn optimize_parallel_transmission_argmin() {
    let (stdout, _, code) = run(&["optimize", "--scheme", "parallel-t"]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let argmin = json["argmin"][0].as_f64().unwrap();
    assert!((argmin - 3f64.sqrt()).abs() < 1e-6);
    assert!((json["min_value"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn reconstruct_offset_probabilities_give_zero_state() {
    // feeding each row's offset corresponds to v = 0
    let (stdout, _, code) = run(&[
        "reconstruct",
        "--strategy",
        "parallel",
        "--channel",
        "t",
        "--kappa",
        "1.7320508075688772",
        "--probs",
        "0.5,0.5,0.5",
    ]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    for i in 0..3 {
        assert!(json["v_raw"][i].as_f64().unwrap().abs() < 1e-12);
    }
    assert_eq!(json["was_clipped"], serde_json::Value::Bool(false));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--strategy",
        "frame",
        "--channel",
        "r",
        "--kappa",
        "1.17",
        "--shots",
        "1000",
        "--replicas",
        "25",
        "--seed",
        "42",
    ];
    let (first, _, c1) = run(&args);
    let (second, _, c2) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(first, second);
}

#[test]
fn simulate_csv_per_replica() {
    let (stdout, _, code) = run(&[
        "simulate",
        "--strategy",
        "parallel",
        "--channel",
        "t",
        "--kappa",
        "2",
        "--shots",
        "500",
        "--replicas",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("replica,error"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn zero_shots_is_a_config_error() {
    let (_, stderr, code) = run(&[
        "simulate",
        "--strategy",
        "parallel",
        "--channel",
        "t",
        "--kappa",
        "1",
        "--shots",
        "0",
    ]);
    assert_eq!(code, 2);
    let json: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(json["code"], 2);
}

#[test]
fn equal_momenta_is_a_degenerate_scheme_error() {
    let (_, stderr, code) = run(&[
        "reconstruct",
        "--strategy",
        "momentum",
        "--kappa",
        "2",
        "--kappa2",
        "2",
        "--probs",
        "0.3,0.3,0.3",
    ]);
    assert_eq!(code, 3);
    let json: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(json["code"], 3);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join("spintomo-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, r#"{"scheme": "parallel-t", "kappa_max": 50}"#).unwrap();

    let (stdout, _, code) = run(&["optimize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(json["scheme"], "parallel-t");

    // the flag wins over the config value
    let (stdout, _, code) = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "frame-t",
    ]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(json["scheme"], "frame-t");
    assert!((json["argmin"][0].as_f64().unwrap() - 1.98311).abs() < 1e-3);
}

#[test]
fn det_grid_marks_the_diagonal_infinite() {
    let (stdout, _, code) = run(&["det-grid", "--box", "1,4", "--resolution", "16"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("kappa1,kappa2,value"));
    let mut saw_inf = false;
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        if fields[2] == "inf" {
            saw_inf = true;
            assert_eq!(fields[0], fields[1]);
        }
    }
    assert_eq!(rows, 16 * 16);
    assert!(saw_inf);
}

#[test]
fn unknown_strategy_is_a_config_error() {
    let (_, stderr, code) = run(&[
        "reconstruct",
        "--strategy",
        "teleportation",
        "--kappa",
        "1",
        "--probs",
        "0.2,0.2,0.2",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown strategy"));
}
