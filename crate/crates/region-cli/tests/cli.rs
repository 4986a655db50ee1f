//! End-to-end tests of the command-line binary: every subcommand on valid
//! and malformed input, exit codes, and byte-reproducibility of the outputs.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_region-cli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("region-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn measure_of_independence_is_all_zero() {
    let out = run(&["measure", r#"{"builtin":"Pi"}"#]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["phi", "rho", "gamma", "beta"] {
        assert_eq!(v[key]["value"], 0.0, "{key}");
        assert_eq!(v[key]["method"], "exact");
    }
    assert_eq!(v["tau"]["value"], 0.0);
}

#[test]
fn measure_reads_files_and_supports_monte_carlo() {
    let path = tmp("shuffle.json");
    fs::write(&path, r#"{"n":2,"splits":[0.5],"pi":[2,1],"omega":[1,1]}"#).unwrap();
    let out = run(&["measure", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["beta"]["value"], -1.0);

    let out = run(&["measure", path.to_str().unwrap(), "--mc", "20000"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["rho"]["method"]["monte-carlo"]["stderr"].as_f64().unwrap() > 0.0);
    assert!((v["rho"]["value"].as_f64().unwrap() + 0.5).abs() < 0.05);
    fs::remove_file(&path).ok();
}

#[test]
fn malformed_json_never_exits_zero() {
    for bad in [
        "not json",
        r#"{"builtin":"X"}"#,
        r#"{"n":2,"splits":[0.5],"pi":[1,1],"omega":[1,1]}"#,
        r#"{"mixture":[{"weight":0.9,"copula":{"builtin":"M"}}]}"#,
    ] {
        let out = run(&["measure", bad]);
        assert_eq!(out.status.code(), Some(1), "input {bad:?}");
    }
    // usage errors are exit code 2
    let out = run(&["bounds"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_at_a_quarter() {
    let out = run(&["bounds", "--at", "0.25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("r = 0.625"), "{text}");
    assert!(text.contains("upper = 0.625"), "{text}");
    // lower = (2 sqrt3/9) 1.5^{3/2} - 1
    let lower = 2.0 * 3.0f64.sqrt() / 9.0 * 1.5f64.powf(1.5) - 1.0;
    assert!(text.contains(&format!("lower = {lower}")), "{text}");
    // negative footrule values parse (half the domain is negative)
    let out = run(&["bounds", "--at", "-0.125"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("lower = -0.75"));
    // out of range is a validation failure
    let out = run(&["bounds", "--at", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn family_emits_concrete_shuffles() {
    let out = run(&["family", r#"{"family":"Ca","a":0.25}"#, "--emit"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["pi"], serde_json::json!([3, 2, 1]));
    assert_eq!(v["omega"], serde_json::json!([-1, 1, -1]));

    // diagonal families echo their canonical descriptor
    let out = run(&["family", r#"{"family":"Kdelta_a","a":0.25}"#, "--emit"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["family"], "Kdelta_a");

    // without --emit a measure report is printed
    let out = run(&["family", r#"{"family":"Cn","n":2}"#]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rho"]["value"], 0.625);
}

#[test]
fn scan_writes_reproducible_csv_and_svg() {
    let csv1 = tmp("scan1.csv");
    let svg1 = tmp("scan1.svg");
    let csv2 = tmp("scan2.csv");
    let svg2 = tmp("scan2.svg");
    for (csv, svg) in [(&csv1, &svg1), (&csv2, &svg2)] {
        let out = run(&[
            "scan",
            "--count",
            "25",
            "--seed",
            "42",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let c1 = fs::read(&csv1).unwrap();
    let c2 = fs::read(&csv2).unwrap();
    assert_eq!(c1, c2, "CSV must be byte-identical across reruns");
    let s1 = fs::read(&svg1).unwrap();
    let s2 = fs::read(&svg2).unwrap();
    assert_eq!(s1, s2, "SVG must be byte-identical across reruns");
    let text = String::from_utf8(c1).unwrap();
    assert!(text.starts_with("phi,rho,source,on_lower,on_r\n"));
    assert_eq!(text.lines().count(), 26);
    for p in [csv1, svg1, csv2, svg2] {
        fs::remove_file(p).ok();
    }
}

#[test]
fn reduce_traces_the_single_step() {
    let trace = tmp("trace.jsonl");
    let out = run(&[
        "reduce",
        r#"{"n":2,"splits":[0.5],"pi":[2,1],"omega":[1,1]}"#,
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["steps"], 1);
    assert_eq!(summary["final"]["q"], 1.0);
    let jsonl = fs::read_to_string(&trace).unwrap();
    assert_eq!(jsonl.lines().count(), 1);
    let step: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(step["case"], "I");
    fs::remove_file(&trace).ok();

    // a shuffle that is not doubly symmetric is rejected
    let out = run(&[
        "reduce",
        r#"{"n":3,"splits":[0.2,0.5],"pi":[2,3,1],"omega":[1,1,1]}"#,
        "--trace",
        "/dev/null",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ksm_prints_the_bracket() {
    let out = run(&["ksm"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lower"].as_f64().unwrap() - 0.65).abs() < 1e-9);
    assert!((v["area_upper"].as_f64().unwrap() - 1.05).abs() < 1e-9);
}

#[test]
fn approx_emits_the_coarse_grid_shuffle() {
    let out = run(&["approx", r#"{"builtin":"Pi"}"#, "--m", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["pi"], serde_json::json!([1, 3, 2, 4]));
    // odd m and asymmetric inputs fail validation
    let out = run(&["approx", r#"{"builtin":"Pi"}"#, "--m", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "approx",
        r#"{"n":2,"splits":[0.3],"pi":[2,1],"omega":[1,1]}"#,
        "--m",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_accepts_valid_and_rejects_invalid() {
    for good in [
        r#"{"builtin":"M"}"#,
        r#"{"family":"Cn","n":3}"#,
        r#"{"family":"smooth","s":0.5}"#,
        r#"{"bernstein":{"n":8,"base":{"builtin":"W"}}}"#,
    ] {
        let out = run(&["verify", good]);
        assert!(out.status.success(), "{good}");
    }
    let out = run(&["verify", r#"{"family":"Ca","a":2.0}"#]);
    assert_eq!(out.status.code(), Some(1));
}
