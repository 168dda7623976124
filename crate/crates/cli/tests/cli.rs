use std::path::PathBuf;
use std::process::{Command, Output};

fn surftn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surftn")).args(args).output().expect("binary runs")
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("surftn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn lattice_export() {
    let o = surftn(&["lattice", "--width", "5", "--height", "3"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["sites"].as_array().unwrap().len(), 15);
    assert_eq!(v["z_logical_support"].as_array().unwrap().len(), 3);
    assert_eq!(v["x_logical_support"].as_array().unwrap().len(), 5);
}

#[test]
fn decode_reports_correction_and_channel() {
    let input = r#"{"width": 3, "height": 3,
        "noise": {"model": "bit-flip", "p": 0.1},
        "syndrome": {"x_outcomes": [1, 1, 1, 1], "z_outcomes": [1, 1, 1, 1]},
        "decoder": {"norm": "trace"}}"#;
    let p = temp_file("decode.json", input);
    let o = surftn(&["decode", "--config", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["correction"], "I");
    assert_eq!(v["network"], "coset");
    assert_eq!(v["config"]["decoder"]["chi"], 8);
    let ptm = &v["channel_ptm"];
    assert!((ptm[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(ptm[1][1].as_f64().unwrap() > 0.9);
    assert_eq!(v["lattice"]["width"], 3);
}

#[test]
fn decode_config_errors_exit_2() {
    assert_eq!(surftn(&["decode"]).status.code(), Some(2));
    let bad = temp_file("bad.json", r#"{"width": 3, "height": 3, "noise": {"model": "bit-flip", "p": 2.0},
        "syndrome": {"x_outcomes": [1, 1, 1, 1], "z_outcomes": [1, 1, 1, 1]}}"#);
    assert_eq!(surftn(&["decode", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let short = temp_file("short.json", r#"{"width": 3, "height": 3, "noise": {"model": "bit-flip", "p": 0.1},
        "syndrome": {"x_outcomes": [1], "z_outcomes": [1, 1, 1, 1]}}"#);
    assert_eq!(surftn(&["decode", "--config", short.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn impossible_syndrome_exits_1() {
    let p = temp_file("zero.json", r#"{"width": 3, "height": 3, "noise": {"model": "bit-flip", "p": 0.1},
        "syndrome": {"x_outcomes": [-1, 1, 1, 1], "z_outcomes": [1, 1, 1, 1]}}"#);
    let o = surftn(&["decode", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_config_errors_exit_2() {
    let p = temp_file("unknown.json", r#"{"kind": "cbf-sweep", "colour": "red"}"#);
    assert_eq!(surftn(&["bench-cbf", "--config", p.to_str().unwrap()]).status.code(), Some(2));
    let p = temp_file("wrongkind.json", r#"{"kind": "timing"}"#);
    assert_eq!(surftn(&["bench-cbf", "--config", p.to_str().unwrap()]).status.code(), Some(2));
    let p = temp_file("wide.json", r#"{"kind": "ad-sweep", "sizes": [5]}"#);
    assert_eq!(surftn(&["bench-ad", "--config", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(surftn(&["bench-cbf", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    assert_eq!(surftn(&["bench-cbf", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn bench_cbf_is_deterministic_across_workers() {
    let p = temp_file("cbf.json", r#"{"kind": "cbf-sweep", "sizes": [3], "inv_betas": [0.8, 1.0], "samples": 150}"#);
    let a = surftn(&["bench-cbf", "--config", p.to_str().unwrap(), "--seed", "9", "--workers", "1"]);
    let b = surftn(&["bench-cbf", "--config", p.to_str().unwrap(), "--seed", "9", "--workers", "4"]);
    assert!(a.status.success());
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.starts_with("# workers")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("# seed: 9"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 3);
}

#[test]
fn bench_ad_json_output_to_file() {
    let cfg = temp_file("ad.json", r#"{"kind": "ad-sweep", "gammas": [0.0, 0.2], "samples": 30, "norm": "trace"}"#);
    let out = cfg.with_file_name("ad-out.json");
    let o = surftn(&["bench-ad", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["samples"], 30);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows.iter().filter(|r| r["param_value"] == 0.0) {
        assert_eq!(r["value"], 0.0);
    }
}

#[test]
fn oracle_check_fails_with_chi_one() {
    let p = temp_file("oc.json", r#"{"kind": "oracle-check", "gammas": [0.2], "inv_betas": [], "chi": 1}"#);
    let o = surftn(&["oracle-check", "--config", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    let dense = v["checks"].as_array().unwrap().iter().find(|c| c["check"] == "dense-choi").unwrap().clone();
    assert_eq!(dense["passed"], false);
}
