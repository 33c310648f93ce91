//! Runs several replications in parallel and writes the full result bundle
//! (metrics CSVs, summary JSON, SVG charts) into a directory.
//!
//! ```text
//! cargo run --release --example batch_output -- /tmp/lloyds-out
//! ```

use std::path::PathBuf;

use lloyds_sim::output::run_scenarios;
use lloyds_sim::{Preset, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lloyds-batch"));
    let mut cfg = ScenarioConfig::preset(Preset::Scenario4);
    cfg.seeds = (0..4).collect();

    let summary = run_scenarios(&cfg, &out, false)?;
    println!(
        "{} seeds, {} insolvencies, offered premium final decade {:?}",
        summary.seeds.len(),
        summary.insolvencies_total,
        summary.offered_premium_final_decade.mean
    );
    let mut files: Vec<_> = std::fs::read_dir(&out)?.chain(std::fs::read_dir(out.join("plots"))?).collect::<Result<_, _>>()?;
    files.sort_by_key(|e| e.path());
    for f in files {
        println!("{}", f.path().display());
    }
    Ok(())
}
