//! Premium and VaR exposure management sub-processes.
//!
//! Premium EM compares premiums written this year against capital: a fraction
//! `premium_reserve_ratio` of written premium is held back, and quoting stops
//! once the reserve outgrows `min_capital_reserve_ratio` times the remaining
//! working capital.
//!
//! VaR EM keeps, per peril region, the damage fraction a catastrophe exceeds
//! with probability `var_exceedance_probability`. A quote is vetoed when
//! `safety * tail_fraction * (region exposure + limit * line)` exceeds
//! capital.

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, RngStreams, SimRng};
use crate::events::{EventKind, MarketEvent, QuoteComponent, Role, SyndicateId};
use crate::losses::CatastropheParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PremiumEmParams {
    pub premium_reserve_ratio: f64,
    pub min_capital_reserve_ratio: f64,
    pub max_scaling_factor: f64,
}

impl PremiumEmParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        PremiumEmParams {
            premium_reserve_ratio: cfg.premium_reserve_ratio,
            min_capital_reserve_ratio: cfg.min_capital_reserve_ratio,
            max_scaling_factor: cfg.max_scaling_factor,
        }
    }
}

/// Price scaling factor, or `None` when the quote is vetoed.
///
/// Below the veto threshold the factor rises linearly from 1 at zero reserve
/// to `max_scaling_factor` at the threshold.
pub fn premium_em_factor(capital: f64, premiums_written: f64, p: &PremiumEmParams) -> Option<f64> {
    let reserved = p.premium_reserve_ratio * premiums_written;
    let working = capital - reserved;
    if working <= 0.0 {
        return None;
    }
    let ratio = reserved / working;
    if ratio > p.min_capital_reserve_ratio {
        return None;
    }
    let utilisation = if p.min_capital_reserve_ratio > 0.0 {
        ratio / p.min_capital_reserve_ratio
    } else {
        0.0
    };
    Some((1.0 + (p.max_scaling_factor - 1.0) * utilisation).clamp(1.0, p.max_scaling_factor.max(1.0)))
}

/// Element at rank `ceil((1 - alpha) * n)` (1-based) of ascending `sorted`.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let n = sorted.len();
    let rank = ((1.0 - alpha) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Tail damage fraction per region, estimated from `samples` catastrophe
/// damage draws per region. Zero everywhere when catastrophes never occur.
pub fn var_tail_fractions<R: Rng + ?Sized>(
    params: &CatastropheParams,
    alpha: f64,
    samples: usize,
    num_regions: usize,
    rng: &mut R,
) -> Vec<f64> {
    if params.mean_events_per_year <= 0.0 {
        return vec![0.0; num_regions];
    }
    (0..num_regions)
        .map(|_| {
            let mut draws: Vec<f64> = (0..samples).map(|_| params.sample_damage(rng)).collect();
            draws.sort_by(f64::total_cmp);
            upper_quantile(&draws, alpha).min(1.0)
        })
        .collect()
}

pub fn var_em_allows(
    capital: f64,
    region_exposure: f64,
    limit: f64,
    proposed_line: f64,
    tail_fraction: f64,
    safety_factor: f64,
) -> bool {
    let required = safety_factor * tail_fraction * (region_exposure + limit * proposed_line);
    required <= capital
}

pub struct PremiumExposureManager {
    pub syndicate_id: SyndicateId,
    params: PremiumEmParams,
    capital: f64,
    premiums_written: f64,
}

impl PremiumExposureManager {
    pub fn new(syndicate_id: SyndicateId, cfg: &ScenarioConfig) -> Self {
        PremiumExposureManager {
            syndicate_id,
            params: PremiumEmParams::from_config(cfg),
            capital: cfg.initial_capital,
            premiums_written: 0.0,
        }
    }
}

impl Process<MarketEvent> for PremiumExposureManager {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::QuoteRequested, EventKind::SyndicateCapitalReported]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::QuoteRequested { syndicate_id, risk, role } if *syndicate_id == self.syndicate_id => {
                let factor = premium_em_factor(self.capital, self.premiums_written, &self.params);
                ctx.emit(MarketEvent::QuoteComponentComputed {
                    syndicate_id: self.syndicate_id,
                    risk_id: risk.id,
                    role: *role,
                    component: QuoteComponent::PremiumScaling(factor),
                });
            }
            MarketEvent::SyndicateCapitalReported { syndicate_id, snapshot } if *syndicate_id == self.syndicate_id => {
                self.capital = snapshot.capital;
                self.premiums_written = snapshot.premiums_written_ytd;
            }
            _ => {}
        }
    }
}

pub struct VarExposureManager {
    pub syndicate_id: SyndicateId,
    cat: CatastropheParams,
    alpha: f64,
    safety_factor: f64,
    samples: usize,
    lead_line: f64,
    follow_line: f64,
    rng: SimRng,
    pub tail_fractions: Vec<f64>,
    capital: f64,
    region_exposure: Vec<f64>,
}

impl VarExposureManager {
    pub fn new(syndicate_id: SyndicateId, cfg: &ScenarioConfig, streams: &RngStreams) -> Self {
        VarExposureManager {
            syndicate_id,
            cat: CatastropheParams::from_config(cfg),
            alpha: cfg.var_exceedance_probability,
            safety_factor: cfg.var_safety_factor,
            samples: cfg.var_simulations,
            lead_line: cfg.default_lead_line_size,
            follow_line: cfg.default_follow_line_size,
            rng: streams.stream(&format!("var_em/{syndicate_id}")),
            tail_fractions: vec![0.0; cfg.num_peril_regions],
            capital: cfg.initial_capital,
            region_exposure: vec![0.0; cfg.num_peril_regions],
        }
    }
}

impl Process<MarketEvent> for VarExposureManager {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::SimulationStarted,
            EventKind::QuoteRequested,
            EventKind::SyndicateCapitalReported,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::SimulationStarted => {
                let regions = self.tail_fractions.len();
                self.tail_fractions = var_tail_fractions(&self.cat, self.alpha, self.samples, regions, &mut self.rng);
            }
            MarketEvent::QuoteRequested { syndicate_id, risk, role } if *syndicate_id == self.syndicate_id => {
                let line = match role {
                    Role::Lead => self.lead_line,
                    Role::Follow => self.follow_line,
                };
                let allowed = var_em_allows(
                    self.capital,
                    self.region_exposure[risk.region],
                    risk.limit,
                    line,
                    self.tail_fractions[risk.region],
                    self.safety_factor,
                );
                ctx.emit(MarketEvent::QuoteComponentComputed {
                    syndicate_id: self.syndicate_id,
                    risk_id: risk.id,
                    role: *role,
                    component: QuoteComponent::VarVerdict(allowed),
                });
            }
            MarketEvent::SyndicateCapitalReported { syndicate_id, snapshot } if *syndicate_id == self.syndicate_id => {
                self.capital = snapshot.capital;
                self.region_exposure.clone_from(&snapshot.region_exposure);
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::des::RngStreams;
    use proptest::prelude::*;
    use rand::Rng;

    fn defaults() -> PremiumEmParams {
        PremiumEmParams::from_config(&ScenarioConfig::default())
    }

    #[test]
    fn premium_em_examples() {
        assert_eq!(premium_em_factor(10_000_000.0, 4_000_000.0, &defaults()), Some(1.0));
        assert_eq!(premium_em_factor(2_000_000.0, 6_000_000.0, &defaults()), None);
        assert_eq!(premium_em_factor(1.0, 0.0, &defaults()), Some(1.0));
    }

    #[test]
    fn premium_em_scales_up_to_cap() {
        let p = PremiumEmParams {
            max_scaling_factor: 1.5,
            ..defaults()
        };
        // reserve 2.5M against working 7.5M: a third of the way to the threshold
        let f = premium_em_factor(10_000_000.0, 5_000_000.0, &p).unwrap();
        assert!((f - (1.0 + 0.5 / 3.0)).abs() < 1e-12);
        let at_threshold = premium_em_factor(10_000_000.0, 10_000_000.0, &p).unwrap();
        assert!((at_threshold - 1.5).abs() < 1e-12);
    }

    #[test]
    fn var_examples() {
        assert!(!var_em_allows(3_000_000.0, 2_000_000.0, 10_000_000.0, 1.0, 0.4, 1.0));
        assert!(var_em_allows(0.0, 1e12, 10_000_000.0, 1.0, 0.4, 0.0));
        assert!(var_em_allows(10_000_000.0, 0.0, 10_000_000.0, 1.0, 0.455, 1.0));
    }

    #[test]
    fn quantile_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(upper_quantile(&v, 0.05), 95.0);
        assert_eq!(upper_quantile(&v, 0.001), 100.0);
        assert_eq!(upper_quantile(&[], 0.05), 0.0);
    }

    #[test]
    fn no_catastrophes_means_no_tail() {
        let cat = CatastropheParams {
            mean_events_per_year: 0.0,
            ..CatastropheParams::from_config(&ScenarioConfig::default())
        };
        let mut rng = RngStreams::new(0).stream("t");
        assert_eq!(var_tail_fractions(&cat, 0.05, 1000, 3, &mut rng), vec![0.0; 3]);
    }

    #[test]
    fn tail_fraction_matches_rejection_sampler() {
        let cat = CatastropheParams::from_config(&ScenarioConfig::default());
        let mut rng = RngStreams::new(7).stream("var");
        let fractions = var_tail_fractions(&cat, 0.05, 100_000, 2, &mut rng);

        // Independent sampler: untruncated Pareto by inversion, rejecting
        // draws above the cap.
        let mut rng = RngStreams::new(8).stream("oracle");
        let (xm, a, cap) = (cat.min_damage_fraction, cat.pareto_shape, cat.max_damage_fraction());
        let mut draws = Vec::with_capacity(100_000);
        while draws.len() < 100_000 {
            let u: f64 = rng.random();
            let x = xm * (1.0 - u).powf(-1.0 / a);
            if x <= cap {
                draws.push(x);
            }
        }
        draws.sort_by(f64::total_cmp);
        let oracle = upper_quantile(&draws, 0.05);
        for f in fractions {
            assert!((f - oracle).abs() / oracle < 0.02, "{f} vs {oracle}");
        }
    }

    proptest! {
        #[test]
        fn premium_em_monotone_in_premiums(capital in 1.0f64..1e8, p1 in 0.0f64..1e8, extra in 0.0f64..1e8) {
            let p = defaults();
            if premium_em_factor(capital, p1, &p).is_none() {
                prop_assert!(premium_em_factor(capital, p1 + extra, &p).is_none());
            }
        }

        #[test]
        fn var_em_monotone_in_exposure(capital in 0.0f64..1e8, e in 0.0f64..1e8, extra in 0.0f64..1e8, tail in 0.0f64..1.0) {
            if !var_em_allows(capital, e, 1e7, 0.5, tail, 1.0) {
                prop_assert!(!var_em_allows(capital, e + extra, 1e7, 0.5, tail, 1.0));
            }
        }
    }
}
