use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use lloyds_sim::config::{Preset, ScenarioConfig};
use lloyds_sim::error::{ConfigError, SimError};
use lloyds_sim::output::run_scenarios;

/// Run market replications and write metrics, summary and charts.
#[derive(Parser, Debug)]
#[command(name = "simulate", version)]
struct Args {
    /// TOML scenario file. Without it the preset (or built-in defaults) is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// scenario1..scenario4
    #[arg(long)]
    preset: Option<String>,
    /// Number of seeds (0..N) or a comma-separated list of seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write the full event trace of every replication.
    #[arg(long)]
    emit_trace: bool,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError::Range {
        field: "seeds",
        value: s.to_string(),
        reason: "expected a count or a comma-separated list",
    };
    if s.contains(',') {
        return s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect();
    }
    let n: u64 = s.trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok((0..n).collect())
}

fn main_inner(args: Args) -> Result<(), SimError> {
    let preset = args.preset.as_deref().map(Preset::parse).transpose()?;
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path, preset)?,
        None => ScenarioConfig::from_env(preset)?,
    };
    if let Some(s) = &args.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    let summary = run_scenarios(&cfg, &args.out, args.emit_trace)?;
    println!(
        "{} replications, {} insolvencies, mean offered premium in final decade {}",
        summary.seeds.len(),
        summary.insolvencies_total,
        summary
            .offered_premium_final_decade
            .mean
            .map_or("n/a".to_string(), |m| format!("{m:.0}"))
    );
    println!("results written to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
