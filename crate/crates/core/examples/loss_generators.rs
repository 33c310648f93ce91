//! Samples the attritional and catastrophe loss laws directly and compares
//! the sample moments with their closed forms.

use rand_distr::Distribution;

use lloyds_sim::analysis::{mean, std_dev};
use lloyds_sim::des::RngStreams;
use lloyds_sim::losses::{allocate_regional_loss, sample_poisson, AttritionalParams, CatastropheParams};
use lloyds_sim::ScenarioConfig;

fn main() {
    let cfg = ScenarioConfig::default();
    let streams = RngStreams::new(11);
    let n = 100_000;

    let att = AttritionalParams::from_config(&cfg);
    let (shape, scale) = att.gamma_shape_scale();
    let mut rng = streams.stream("example/attritional");
    let sev: Vec<f64> = (0..n).map(|_| att.severity().sample(&mut rng)).collect();
    let m = mean(&sev).unwrap();
    println!("gamma shape {shape} scale {scale}");
    println!("  severity mean {m:.0} (expected {:.0}), cov {:.3}", att.mean_severity, std_dev(&sev).unwrap() / m);
    let counts: Vec<f64> = (0..n).map(|_| sample_poisson(&mut rng, att.yearly_claim_frequency) as f64).collect();
    println!("  claims per risk-year {:.4} (expected {})", mean(&counts).unwrap(), att.yearly_claim_frequency);

    let cat = CatastropheParams::from_config(&cfg);
    let mut rng = streams.stream("example/catastrophe");
    let dmg: Vec<f64> = (0..n).map(|_| cat.sample_damage(&mut rng)).collect();
    let a = cat.pareto_shape;
    println!(
        "catastrophe damage fraction: min {:.3}, mean {:.4} (untruncated {:.4}), max {:.3} (cap {:.3})",
        dmg.iter().copied().fold(f64::INFINITY, f64::min),
        mean(&dmg).unwrap(),
        cat.min_damage_fraction * a / (a - 1.0),
        dmg.iter().copied().fold(0.0, f64::max),
        cat.max_damage_fraction()
    );

    let (per_risk, uninsured) = allocate_regional_loss(15_000_000.0, &[10_000_000.0]);
    println!("15M regional loss on one 10M risk: insured {per_risk:?}, uninsured {uninsured}");
}
