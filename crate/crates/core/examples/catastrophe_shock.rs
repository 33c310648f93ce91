//! Adds catastrophes to the market and shows what each event did: the
//! insured loss, the capital hit per syndicate in the event year and the
//! market price in the years around it.

use lloyds_sim::analysis::{capital_changes, market_offered_by_year};
use lloyds_sim::des::SimTime;
use lloyds_sim::{run, Preset, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let cfg = ScenarioConfig::preset(Preset::Scenario2);
    let out = run(&cfg, seed, false)?;

    let prices = market_offered_by_year(&out.frames);
    let changes = capital_changes(&out.frames, cfg.initial_capital);
    if out.catastrophes.is_empty() {
        println!("seed {seed}: no catastrophe in {} years", cfg.horizon_years);
    }
    for cat in &out.catastrophes {
        let year = SimTime::from_day(cat.day).year() + 1;
        println!(
            "day {} (year {year}) region {}: damage {:.1}% of limit, {} policies hit, insured loss {:.0}",
            cat.day,
            cat.region,
            cat.damage_fraction * 100.0,
            cat.policies_hit,
            cat.insured
        );
        for (sid, by_year) in &changes {
            if let Some(c) = by_year.get(&year) {
                println!("  syndicate {sid}: capital change {c:>14.0}");
            }
        }
        let window: Vec<String> = (year.saturating_sub(2)..=year + 2)
            .map(|y| prices.get(&y).map_or(format!("{y}:-"), |p| format!("{y}:{p:.0}")))
            .collect();
        println!("  market offered premium {}", window.join("  "));
    }
    Ok(())
}
