//! Actuarial and underwriting sub-processes of a syndicate.
//!
//! The actuarial price blends the syndicate's own loss experience with the
//! industry-wide frequency and severity:
//!
//! ```text
//! expected = z * own + (1 - z) * industry_frequency * industry_severity
//! price    = expected + alpha * volatility
//! ```
//!
//! Own experience is an exponentially weighted average of yearly observed
//! cost per policy-year, with claims normalised to a 100% share. The
//! underwriter multiplies the actuarial price by `exp(m)`, where the log
//! markup `m` tracks the syndicate's lead win rate.

use crate::config::ScenarioConfig;
use crate::des::{Context, Process};
use crate::events::{EventKind, MarketEvent, QuoteComponent, Role, SyndicateId};

pub fn expected_claim_cost(z: f64, own_average: f64, industry_frequency: f64, industry_severity: f64) -> f64 {
    z * own_average + (1.0 - z) * industry_frequency * industry_severity
}

pub fn actuarial_price(expected_cost: f64, volatility_weight: f64, volatility: f64) -> f64 {
    expected_cost + volatility_weight * volatility
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActuarialState {
    pub internal_weight: f64,
    pub recency_weight: f64,
    pub volatility_weight: f64,
    pub own_average: f64,
    pub own_variance: f64,
    pub industry_frequency: f64,
    pub industry_severity: f64,
    pub observations: u64,
}

impl ActuarialState {
    /// Starts from the configured industry assumptions, which also seed the
    /// syndicate's own average.
    pub fn new(cfg: &ScenarioConfig) -> Self {
        ActuarialState {
            internal_weight: cfg.internal_experience_weight,
            recency_weight: cfg.loss_recency_weight,
            volatility_weight: cfg.volatility_weight,
            own_average: cfg.initial_claim_frequency * cfg.initial_claim_severity,
            own_variance: 0.0,
            industry_frequency: cfg.initial_claim_frequency,
            industry_severity: cfg.initial_claim_severity,
            observations: 0,
        }
    }

    pub fn volatility(&self) -> f64 {
        self.own_variance.sqrt()
    }

    pub fn expected_cost(&self) -> f64 {
        expected_claim_cost(
            self.internal_weight,
            self.own_average,
            self.industry_frequency,
            self.industry_severity,
        )
    }

    pub fn price(&self) -> f64 {
        actuarial_price(self.expected_cost(), self.volatility_weight, self.volatility())
    }

    /// Folds one annual cost observation into the moving average and the
    /// moving variance.
    pub fn observe(&mut self, annual_cost: f64) {
        let w = self.recency_weight;
        let deviation = annual_cost - self.own_average;
        self.own_average += w * deviation;
        self.own_variance = (1.0 - w) * (self.own_variance + w * deviation * deviation);
        self.observations += 1;
    }

    pub fn set_industry(&mut self, frequency: f64, severity: f64) {
        self.industry_frequency = frequency;
        self.industry_severity = severity;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkupState {
    pub log_markup: f64,
    pub recency_weight: f64,
    pub gain: f64,
    pub target_win_rate: f64,
    pub enabled: bool,
}

impl MarkupState {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        MarkupState {
            log_markup: 0.0,
            recency_weight: cfg.underwriter_recency_weight,
            gain: cfg.markup_gain,
            target_win_rate: cfg.markup_target_win_rate,
            enabled: cfg.features.markup,
        }
    }

    pub fn factor(&self) -> f64 {
        if self.enabled {
            self.log_markup.exp()
        } else {
            1.0
        }
    }

    pub fn update(&mut self, win_rate: f64) {
        if !self.enabled {
            return;
        }
        let w = self.recency_weight;
        self.log_markup = (1.0 - w) * self.log_markup + w * self.gain * (win_rate - self.target_win_rate);
    }
}

/// Actuarial sub-process. Quotes on every request and re-estimates its own
/// claim experience when the parent closes a year.
pub struct ActuarialPricer {
    pub syndicate_id: SyndicateId,
    pub state: ActuarialState,
    full_risk_claims_ytd: f64,
}

impl ActuarialPricer {
    pub fn new(syndicate_id: SyndicateId, cfg: &ScenarioConfig) -> Self {
        ActuarialPricer {
            syndicate_id,
            state: ActuarialState::new(cfg),
            full_risk_claims_ytd: 0.0,
        }
    }
}

impl Process<MarketEvent> for ActuarialPricer {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::QuoteRequested,
            EventKind::ClaimReceived,
            EventKind::SyndicateCapitalReported,
            EventKind::IndustryLossStatisticsReported,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::QuoteRequested { syndicate_id, risk, role } if *syndicate_id == self.syndicate_id => {
                ctx.emit(MarketEvent::QuoteComponentComputed {
                    syndicate_id: self.syndicate_id,
                    risk_id: risk.id,
                    role: *role,
                    component: QuoteComponent::ActuarialPrice(self.state.price()),
                });
            }
            MarketEvent::ClaimReceived(claim) if claim.syndicate_id == self.syndicate_id => {
                if claim.signed_line > 0.0 {
                    self.full_risk_claims_ytd += claim.amount / claim.signed_line;
                }
            }
            MarketEvent::SyndicateCapitalReported { syndicate_id, snapshot } if *syndicate_id == self.syndicate_id => {
                if snapshot.closed_year.is_some() {
                    if snapshot.exposure_years_ytd > 0.0 {
                        self.state.observe(self.full_risk_claims_ytd / snapshot.exposure_years_ytd);
                    }
                    self.full_risk_claims_ytd = 0.0;
                }
            }
            MarketEvent::IndustryLossStatisticsReported { claim_frequency, claim_severity } => {
                self.state.set_industry(*claim_frequency, *claim_severity);
            }
            _ => {}
        }
    }
}

/// Underwriting sub-process: supplies the markup factor and adapts it to
/// the yearly lead win rate.
pub struct Underwriter {
    pub syndicate_id: SyndicateId,
    pub state: MarkupState,
    lead_offers_ytd: u64,
    lead_wins_ytd: u64,
}

impl Underwriter {
    pub fn new(syndicate_id: SyndicateId, cfg: &ScenarioConfig) -> Self {
        Underwriter {
            syndicate_id,
            state: MarkupState::new(cfg),
            lead_offers_ytd: 0,
            lead_wins_ytd: 0,
        }
    }
}

impl Process<MarketEvent> for Underwriter {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::QuoteRequested,
            EventKind::LeadQuoteOffered,
            EventKind::LeadQuoteAccepted,
            EventKind::Year,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::QuoteRequested { syndicate_id, risk, role } if *syndicate_id == self.syndicate_id => {
                ctx.emit(MarketEvent::QuoteComponentComputed {
                    syndicate_id: self.syndicate_id,
                    risk_id: risk.id,
                    role: *role,
                    component: QuoteComponent::Markup(self.state.factor()),
                });
            }
            MarketEvent::LeadQuoteOffered(q) if q.syndicate_id == self.syndicate_id && q.role == Role::Lead => {
                self.lead_offers_ytd += 1;
            }
            MarketEvent::LeadQuoteAccepted { syndicate_id, .. } if *syndicate_id == self.syndicate_id => {
                self.lead_wins_ytd += 1;
            }
            MarketEvent::Year => {
                if self.lead_offers_ytd > 0 {
                    let win_rate = self.lead_wins_ytd as f64 / self.lead_offers_ytd as f64;
                    self.state.update(win_rate);
                }
                self.lead_offers_ytd = 0;
                self.lead_wins_ytd = 0;
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn blended_expected_cost() {
        assert!(close(expected_claim_cost(0.5, 400_000.0, 0.1, 3_000_000.0), 350_000.0));
        assert!(close(expected_claim_cost(1.0, 400_000.0, 0.1, 3_000_000.0), 400_000.0));
        assert!(close(expected_claim_cost(0.0, 400_000.0, 0.1, 3_000_000.0), 300_000.0));
    }

    #[test]
    fn volatility_loading() {
        assert!(close(actuarial_price(300_000.0, 1.0, 50_000.0), 350_000.0));
        assert!(close(actuarial_price(300_000.0, 0.0, 50_000.0), 300_000.0));
        let state = ActuarialState {
            volatility_weight: 3.0,
            ..ActuarialState::new(&ScenarioConfig::default())
        };
        assert!(close(state.price(), 300_000.0));
    }

    #[test]
    fn moving_average_step() {
        let mut s = ActuarialState::new(&ScenarioConfig::default());
        assert!(close(s.own_average, 300_000.0));
        s.observe(500_000.0);
        assert!(close(s.own_average, 340_000.0));
        s.recency_weight = 1.0;
        s.observe(123.0);
        assert!(close(s.own_average, 123.0));
    }

    #[test]
    fn markup_examples() {
        let cfg = ScenarioConfig {
            features: crate::config::Features {
                markup: true,
                ..Default::default()
            },
            ..ScenarioConfig::default()
        };
        let mut m = MarkupState::new(&cfg);
        assert_eq!(m.factor(), 1.0);
        m.update(0.7);
        assert!(close(m.log_markup, 0.04));
        let before = m.log_markup;
        m.update(0.5);
        assert!(close(m.log_markup, 0.8 * before));

        m.log_markup = 1.1f64.ln();
        assert!(close(m.factor(), 1.1));

        let mut frozen = MarkupState { recency_weight: 0.0, ..m.clone() };
        frozen.update(0.9);
        assert_eq!(frozen.log_markup, m.log_markup);

        let mut off = MarkupState::new(&ScenarioConfig::default());
        off.update(0.9);
        assert_eq!(off.factor(), 1.0);
    }

    proptest! {
        #[test]
        fn moving_average_contracts_to_constant(start in 0.0f64..1e7, c in 0.0f64..1e7, w in 0.01f64..1.0) {
            let mut s = ActuarialState::new(&ScenarioConfig::default());
            s.own_average = start;
            s.recency_weight = w;
            for _ in 0..20 {
                let before = (s.own_average - c).abs();
                s.observe(c);
                let after = (s.own_average - c).abs();
                prop_assert!(after <= (1.0 - w) * before + 1e-6);
            }
        }

        #[test]
        fn price_positive_for_nonnegative_claims(obs in prop::collection::vec(0.0f64..1e8, 0..30), alpha in 0.0f64..5.0) {
            let mut s = ActuarialState::new(&ScenarioConfig::default());
            s.volatility_weight = alpha;
            for o in obs {
                s.observe(o);
                prop_assert!(s.own_average >= 0.0 && s.own_variance >= 0.0);
            }
            prop_assert!(s.price() > 0.0);
        }
    }
}
