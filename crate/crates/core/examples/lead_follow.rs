//! Syndicated market: shows how bound policies are split between a lead and
//! its followers, and compares price dispersion and loss-ratio coupling with
//! the single-insurer market.

use lloyds_sim::analysis::{insolvencies, loss_ratio_correlation, premium_dispersion};
use lloyds_sim::{run, Preset, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 2;
    let syndicated = ScenarioConfig::preset(Preset::Scenario4);
    let single = ScenarioConfig::preset(Preset::Scenario1);
    let a = run(&syndicated, seed, false)?;
    let b = run(&single, seed, false)?;

    for p in a.policies.iter().take(5) {
        let follows: Vec<String> = p.follows.iter().map(|(s, l)| format!("s{s}:{l:.3}")).collect();
        println!(
            "risk {:>5} premium {:>9.0} lead s{}:{:.2} follows [{}] total line {:.3}",
            p.risk.id,
            p.premium,
            p.lead.0,
            p.lead.1,
            follows.join(" "),
            p.signed_total()
        );
    }
    let years = 10..=syndicated.horizon_years;
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    println!("\n                      syndicated   single");
    println!(
        "premium dispersion    {:>10}   {:>6}",
        fmt(premium_dispersion(&a.frames, years.clone())),
        fmt(premium_dispersion(&b.frames, years))
    );
    println!(
        "loss-ratio corr.      {:>10}   {:>6}",
        fmt(loss_ratio_correlation(&a.frames)),
        fmt(loss_ratio_correlation(&b.frames))
    );
    println!("insolvencies          {:>10}   {:>6}", insolvencies(&a.frames), insolvencies(&b.frames));
    Ok(())
}
