use std::fs;
use std::process::Command;

use lloyds_sim::output::{parse_metrics_csv, METRICS_HEADER};

fn simulate() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_simulate"));
    for (k, _) in std::env::vars() {
        if k.starts_with("LLOYDS_SIM_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

#[test]
fn writes_results_for_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    fs::write(&cfg, "horizon_years = 3\n").unwrap();
    let out = dir.path().join("out");
    let status = simulate()
        .args(["--config", cfg.to_str().unwrap(), "--preset", "scenario2", "--seeds", "0,7"])
        .args(["--out", out.to_str().unwrap(), "--emit-trace"])
        .status()
        .unwrap();
    assert!(status.success());
    for name in [
        "summary.json",
        "config.toml",
        "metrics_seed_0.csv",
        "metrics_seed_7.csv",
        "industry_seed_0.csv",
        "portfolio_seed_0.csv",
        "catastrophes_seed_7.csv",
        "trace_seed_7.csv",
        "plots/capital_seed_0.svg",
        "plots/premium_seed_7.svg",
        "plots/loss_ratio_seed_0.svg",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let csv = fs::read_to_string(out.join("metrics_seed_7.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(METRICS_HEADER));
    let rows = parse_metrics_csv(&csv).unwrap();
    assert!(rows.iter().all(|(seed, f)| *seed == 7 && f.year <= 3));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["preset"], "scenario2");
    assert_eq!(summary["seeds"], serde_json::json!([0, 7]));
    let svg = fs::read_to_string(out.join("plots/capital_seed_0.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn environment_overrides_reach_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = simulate()
        .env("LLOYDS_SIM_HORIZON_YEARS", "2")
        .env("LLOYDS_SIM_RISKS_PER_DAY", "0.01")
        .env("LLOYDS_SIM_FEATURES_MARKUP", "true")
        .args(["--seeds", "1", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let written = fs::read_to_string(out.join("config.toml")).unwrap();
    let cfg = lloyds_sim::ScenarioConfig::from_toml_str(&written).unwrap();
    assert_eq!(cfg.horizon_years, 2);
    assert_eq!(cfg.risks_per_day, 0.01);
    assert!(cfg.features.markup);
}

#[test]
fn invalid_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "volatility_weight = -1.0\n").unwrap();
    let output = simulate()
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("volatility_weight"));
}

#[test]
fn missing_config_and_bad_preset_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let missing = simulate()
        .args(["--config", "/nonexistent/x.toml", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!missing.success());
    let preset = simulate()
        .args(["--preset", "scenario9", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!preset.success());
    let env = simulate()
        .env("LLOYDS_SIM_NOT_A_KEY", "1")
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!env.success());
}

#[test]
fn unwritable_output_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let status = simulate()
        .env("LLOYDS_SIM_HORIZON_YEARS", "1")
        .args(["--seeds", "1", "--out", blocker.join("out").to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!status.success());
}
