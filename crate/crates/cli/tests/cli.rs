//! End-to-end runs of the binary. Golden files live in `tests/golden`; set
//! `UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evoswitch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str, args: &[&str]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = stdout(args);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "output of {args:?} differs from {name}");
}

fn temp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

const HD: &str = r#"{"a":0,"b":0.4,"c":0.6,"d":0}"#;
const PD_1: &str = r#"{"a":0,"b":0,"c":1,"d":0}"#;
const PD_2: &str = r#"{"a":0,"b":1,"c":0,"d":0}"#;
const CO_1: &str = r#"{"a":0,"b":0,"c":0,"d":1}"#;
const CO_2: &str = r#"{"a":1,"b":0,"c":0,"d":0}"#;
const BIMATRIX: &str = r#"{"A":{"a":1,"b":2,"c":0,"d":0},"B":{"a":0,"b":0,"c":2,"d":3}}"#;

#[test]
fn golden_classify() {
    golden("classify_hd.csv", &["classify", "--game", HD]);
    golden("classify_degenerate.csv", &["classify", "--a", "2", "--b", "3", "--c", "2", "--d", "3"]);
    golden("classify_bimatrix.csv", &["classify", "--bimatrix", BIMATRIX, "--p", "0.42"]);
}

#[test]
fn golden_portrait_sweeps() {
    golden("sweep_pd.csv", &["portrait-sweep", "--first", PD_1, "--second", PD_2, "--p-points", "11"]);
    golden("sweep_co.csv", &["portrait-sweep", "--first", CO_1, "--second", CO_2, "--p-points", "11"]);
}

#[test]
fn golden_rsp_and_asymmetric() {
    golden("rsp_mixed.csv", &["rsp", "--a", "1", "--b", "1", "--second", r#"{"a":1,"b":2}"#, "--p", "0.9"]);
    golden("asym_regime.csv", &["asym-regime", "--bimatrix", BIMATRIX, "--p-points", "11"]);
}

#[test]
fn golden_trajectory() {
    golden(
        "trajectory_constant.csv",
        &[
            "trajectory",
            "--incentive",
            r#"{"kind":"constant","level":1}"#,
            "--x0",
            "0.8,0.1,0.1",
            "--t-end",
            "2",
            "--dt",
            "0.01",
            "--stride",
            "20",
        ],
    );
}

#[test]
fn golden_moran() {
    golden("moran_exact.csv", &["moran", "--s", "3", "--t", "0.5", "-N", "20", "--p-points", "6", "--runs", "0"]);
    golden("moran_mc.csv", &["moran", "--s", "2", "--t", "1", "-N", "10", "--p", "0.5", "--runs", "2000", "--seed", "7"]);
}

#[test]
fn golden_heatmap_and_theorem1() {
    golden(
        "heatmap_small.csv",
        &["fixation-heatmap", "--p-points", "3", "--s-min", "0", "--s-max", "2", "--s-points", "3"],
    );
    golden(
        "theorem1_sweep.csv",
        &["theorem1", "--first", r#"{"a":3,"b":0,"c":1,"d":2}"#, "--target", "HD", "--p-star", "0.3", "--sweep-points", "11"],
    );
}

#[test]
fn csv_is_lf_terminated_with_header() {
    let out = stdout(&["fixation-heatmap", "--p-points", "2", "--s-points", "2"]);
    assert!(!out.contains('\r'));
    assert!(out.ends_with('\n'));
    assert_eq!(out.lines().next(), Some("p,s,phi_closed,phi_exact"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn default_heatmap_grid() {
    let out = stdout(&["fixation-heatmap"]);
    assert_eq!(out.lines().count(), 1 + 101 * 101);
    // Cell p = 1, s = 2 closes at (1 - 1/2) / (1 - 2^-20).
    let row = out.lines().find(|l| l.starts_with("1,2,")).unwrap();
    let phi: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((phi - 0.5 / (1.0 - 2f64.powi(-20))).abs() < 1e-15);
}

#[test]
fn json_output_parses() {
    let out = stdout(&["--format", "json", "classify", "--game", HD]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class"], "HD");
    let out = stdout(&["--format", "json", "moran", "--s", "2", "--t", "1", "-N", "10", "--p", "0.5", "--runs", "0"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["summary"]["results"][0]["phi_exact"].is_f64());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["classify", "--game", "{not json"]), Some(2));
    assert_eq!(code(&["classify", "--game", r#"{"a":1}"#]), Some(2));
    assert_eq!(code(&["moran", "--s", "2", "--t", "1", "-N", "10", "--p", "0.5"]), Some(2), "missing seed");
    assert_eq!(code(&["fixation-heatmap", "--p-points", "1"]), Some(2));
    assert_eq!(code(&["--config", "/nonexistent/config.json", "rsp"]), Some(2));

    let out = run(&[
        "trajectory",
        "--incentive",
        r#"{"kind":"projection","landscape":[[1,1],[0,0]]}"#,
        "--x0",
        "0.5,0.5",
        "--t-end",
        "5",
        "--dt",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let partial = String::from_utf8(out.stdout).unwrap();
    assert!(partial.starts_with("t,x_1,x_2\n") && partial.lines().count() > 10);

    let args = ["moran", "--s", "1", "--t", "1", "-N", "50", "--p", "0.5", "--i0", "25", "--runs", "20"];
    let out = run(&[&args[..], &["--seed", "1", "--step-limit", "3"]].concat());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn emitted_configs_reproduce_runs() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["classify", "--game", HD],
        vec!["classify", "--bimatrix", BIMATRIX, "--p", "0.42"],
        vec!["portrait-sweep", "--first", CO_1, "--second", CO_2, "--p-points", "7"],
        vec!["rsp", "--a", "1", "--b", "2"],
        vec!["asym-regime", "--bimatrix", BIMATRIX, "--p", "0.3"],
        vec!["trajectory", "--incentive", r#"{"kind":"logit","landscape":[[0,1],[1,0]],"eta":0.3}"#, "--x0", "0.9,0.1", "--t-end", "1"],
        vec!["iss-check", "--incentive", r#"{"kind":"replicator","landscape":[[0,0.6],[0.4,0]]}"#, "--x-hat", "0.6,0.4", "--samples", "500"],
        vec!["moran", "--s", "3", "--t", "0.5", "-N", "12", "--p", "0.3", "--runs", "500"],
        vec!["fixation-heatmap", "--p-points", "4", "--s-points", "4", "-N", "8"],
        vec!["theorem1", "--first", r#"{"a":3,"b":0,"c":1,"d":2}"#, "--target", "P1", "--p-star", "0.6"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let direct = stdout(&[&["--seed", "11"], &args[..]].concat());
        let emitted = stdout(&[&["--seed", "11", "--emit-config"], &args[..]].concat());
        let path = temp(&format!("config-{k}.json"));
        std::fs::write(&path, &emitted).unwrap();
        let config = path.to_str().unwrap();
        assert_eq!(stdout(&["--config", config]), direct, "{args:?}");
        assert_eq!(stdout(&["--config", config, args[0]]), direct, "{args:?}");
        // A re-emitted config is the same config.
        assert_eq!(stdout(&["--config", config, "--emit-config"]), emitted);
    }
}

#[test]
fn flags_override_config() {
    let path = temp("override.json");
    std::fs::write(&path, r#"{"command":"fixation-heatmap","N":10,"p_grid":{"min":0,"max":1,"points":3}}"#).unwrap();
    let config = path.to_str().unwrap();
    let from_file = stdout(&["--config", config]);
    assert_eq!(from_file.lines().count(), 1 + 3 * 101);
    let overridden = stdout(&["--config", config, "fixation-heatmap", "--p-points", "2", "--s-points", "2"]);
    assert_eq!(overridden.lines().count(), 1 + 2 * 2);
    assert_eq!(overridden, stdout(&["fixation-heatmap", "-N", "10", "--p-points", "2", "--s-points", "2"]));

    std::fs::write(&path, r#"{"command":"rsp","game":{"a":1,"b":2}}"#).unwrap();
    assert_eq!(run(&["--config", config, "moran"]).status.code(), Some(2), "command mismatch");
    std::fs::write(&path, r#"{"command":"rsp","game":{"a":1,"b":2},"typo":1}"#).unwrap();
    assert_eq!(run(&["--config", config]).status.code(), Some(2), "unknown key");
}

#[test]
fn out_flag_writes_file() {
    let path = temp("out.csv");
    let _ = std::fs::remove_file(&path);
    let printed = stdout(&["--out", path.to_str().unwrap(), "rsp", "--a", "2", "--b", "1"]);
    assert!(printed.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b,regime\n2,1,converge_to_barycenter\n");
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let args = ["moran", "--s", "1.5", "--t", "0.8", "-N", "15", "--p", "0.4", "--runs", "3000", "--seed", "5"];
    let with = |threads: &str| {
        let out = bin().args(args).env("EVOSWITCH_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(with("1"), with("4"));
    let bad = bin().args(args).env("EVOSWITCH_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn moran_summary_on_stderr() {
    let out = run(&["moran", "--s", "2", "--t", "2", "-N", "20", "--p", "0.5", "--runs", "4000", "--seed", "3"]);
    assert!(out.status.success());
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    let r = &summary["results"][0];
    let (hat, exact, se) = (r["phi_hat"].as_f64().unwrap(), r["phi_exact"].as_f64().unwrap(), r["stderr"].as_f64().unwrap());
    assert!((r["difference"].as_f64().unwrap() - (hat - exact)).abs() < 1e-15);
    assert!((hat - exact).abs() < 4.0 * se);
}

#[test]
fn zero_weight_mixture_matches_second_incentive() {
    let common = ["--x0", "0.6,0.3,0.1", "--t-end", "3", "--dt", "0.01"];
    let rsp = "[[0,1,-2],[-2,0,1],[1,-2,0]]";
    let second = format!(r#"{{"kind":"replicator","landscape":{rsp}}}"#);
    let mixed = format!(r#"{{"kind":"mixture","p":0,"first":{{"kind":"best_reply","landscape":{rsp}}},"second":{second}}}"#);
    let pure = stdout(&[&["trajectory", "--incentive", &second], &common[..]].concat());
    let mix = stdout(&[&["trajectory", "--incentive", &mixed], &common[..]].concat());
    assert_eq!(pure, mix);
}

#[test]
fn rsp_kl_column_follows_the_regime() {
    let third = 1.0f64 / 3.0;
    let reference = format!("[{third},{third},{}]", 1.0 - 2.0 * third);
    let out = stdout(&[
        "trajectory",
        "--incentive",
        r#"{"kind":"replicator","landscape":[[0,1,-1.1],[-1.1,0,1],[1,-1.1,0]]}"#,
        "--x0",
        "0.6,0.3,0.1",
        "--t-end",
        "20",
        "--dt",
        "0.01",
        "--lyapunov",
        &format!(r#"{{"kind":"kl","reference":{reference}}}"#),
    ]);
    let v: Vec<f64> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    // RSP(1, 1.1) has losses outweighing wins, so the divergence grows.
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}
