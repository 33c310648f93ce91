//! Compares the catastrophe market without exposure management, with the
//! premium-based rule and with the VaR rule: insolvencies and how evenly
//! portfolios spread over peril regions.

use lloyds_sim::analysis::{insolvencies, mean, uniform_deviation};
use lloyds_sim::output::run_batch;
use lloyds_sim::{Preset, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: Vec<u64> = (0..5).collect();
    let premium_em = ScenarioConfig::preset(Preset::Scenario2);
    let mut no_em = premium_em.clone();
    no_em.features.premium_em = false;
    let var_em = ScenarioConfig::preset(Preset::Scenario3);

    println!("variant      insolvencies  uniform_deviation(final decade)");
    for (name, cfg) in [("none", &no_em), ("premium", &premium_em), ("var", &var_em)] {
        let runs = run_batch(cfg, &seeds, false, true)?;
        let last = cfg.horizon_years - 9..=cfg.horizon_years;
        let failed: usize = runs.iter().map(|r| insolvencies(&r.frames)).sum();
        let ud: Vec<f64> = runs
            .iter()
            .filter_map(|r| uniform_deviation(&r.frames, last.clone()))
            .collect();
        let ud = mean(&ud).map_or("-".into(), |u| format!("{u:.4}"));
        println!("{name:<12} {failed:>12}  {ud:>31}");
    }
    Ok(())
}
