use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn smaass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smaass"))
        .args(args)
        .env_remove("SMAASS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smaass-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(smaass(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(smaass(&["p2", "eval", "-k", "3", "-l", "12"]).status.code(), Some(64));
}

#[test]
fn help_exits_cleanly() {
    let o = smaass(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verify-all"));
}

#[test]
fn spectral_check_reports_relative_error() {
    let o = smaass(&["elliptic", "spectral-check", "-k", "-2", "-l", "8", "-s", "0.75", "-n", "1", "-m", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!(v["rel_err"].as_f64().unwrap() < 1e-8, "{v}");
}

#[test]
fn divergent_series_is_refused_with_advisory_code() {
    let o = smaass(&["elliptic", "eval", "--term", "phi:2:0:1", "--tau", "0,1", "--height", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("convergence"));
}

#[test]
fn quick_verification_passes() {
    let o = smaass(&["--format", "text", "verify-all", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 4);
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn config_file_sets_format_and_flags_override_it() {
    let cfg = scratch("csv.toml", "format = \"csv\"\n[heights]\nsp2 = 1\n");
    let cfg = cfg.to_str().unwrap();
    let o = smaass(&["--config", cfg, "sp2", "cosets", "--count"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "c_zero,cosets,height\n40,1440,1\n");
    let o = smaass(&["--config", cfg, "--format", "json", "sp2", "cosets", "--count"]);
    assert_eq!(json(&o)["cosets"], 1440);
    let o = Command::new(env!("CARGO_BIN_EXE_smaass"))
        .args(["sp2", "cosets", "--count"])
        .env("SMAASS_CONFIG", cfg)
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("c_zero,cosets,height"));
}

#[test]
fn bad_config_is_a_usage_error() {
    let cfg = scratch("bad.toml", "[quadrature]\nrel_tol = -1.0\n");
    assert_eq!(smaass(&["--config", cfg.to_str().unwrap(), "sp2", "cosets"]).status.code(), Some(64));
}

#[test]
fn kst_search_writes_csv_and_plot_data() {
    let plot = std::env::temp_dir().join(format!("smaass-kst-{}.csv", std::process::id()));
    let o = smaass(&[
        "--format",
        "csv",
        "--emit-plot-data",
        plot.to_str().unwrap(),
        "p2",
        "kst-search",
        "--height",
        "2",
        "--grid",
        "1.05,2",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "y,min_abs_det\n1.05e0,1.05e0\n");
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("y,min_abs_det"));
}

#[test]
fn diagram_marks_the_wall() {
    let o = smaass(&["--format", "text", "sl2", "diagram", "--factor", "phi_kd:10:2", "--window", "0,12"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("|>") && out.contains("(●)"));
}
