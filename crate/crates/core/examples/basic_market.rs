//! Runs the attritional-only market for one seed and prints a yearly view of
//! offered premiums, loss ratios and surviving syndicates.
//!
//! ```text
//! cargo run --release --example basic_market -- 3
//! ```

use std::collections::BTreeMap;

use lloyds_sim::analysis::{mean, RunSummary};
use lloyds_sim::{run, Preset, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let cfg = ScenarioConfig::preset(Preset::Scenario1);
    let out = run(&cfg, seed, false)?;

    let mut years: BTreeMap<u32, Vec<_>> = BTreeMap::new();
    for f in &out.frames {
        years.entry(f.year).or_default().push(f);
    }
    println!("year  alive  offered_mean  market_loss_ratio");
    for (year, frames) in &years {
        let alive = frames.iter().filter(|f| !f.insolvent).count();
        let offered: Vec<f64> = frames.iter().filter_map(|f| f.premiums_offered_mean).collect();
        let premiums: f64 = frames.iter().map(|f| f.premiums_earned).sum();
        let claims: f64 = frames.iter().map(|f| f.claims_paid).sum();
        let lr = if premiums > 0.0 { format!("{:.3}", claims / premiums) } else { "-".into() };
        let offered = mean(&offered).map_or("-".into(), |m| format!("{m:.0}"));
        println!("{year:>4}  {alive:>5}  {offered:>12}  {lr:>17}");
    }

    let summary = RunSummary::from_run(&out, cfg.horizon_years);
    println!("\n{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
