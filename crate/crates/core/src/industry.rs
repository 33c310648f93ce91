//! Market-wide loss statistics published once a year to every actuarial
//! sub-process.
//!
//! Frequency is claims per policy-year of cover, severity the mean full-risk
//! loss per claim. Each physical loss counts once, however many syndicates
//! share it.

use std::collections::HashSet;

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, SimTime, DAYS_PER_YEAR};
use crate::events::{EventKind, LossId, MarketEvent, PricingStatistics, RiskId};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IndustryYear {
    pub year: u32,
    pub claim_frequency: f64,
    pub claim_severity: f64,
    pub claims: u64,
    pub total_claims: f64,
    pub policy_years: f64,
    pub risks_entered: u64,
    pub policies_bound: u64,
    pub mean_bound_premium: f64,
}

/// Frequency and severity for one year, carrying the previous values over
/// empty denominators: no cover keeps the old frequency, no claims keeps the
/// old severity.
pub fn estimate(
    claims: u64,
    total_claims: f64,
    policy_years: f64,
    previous: (f64, f64),
) -> (f64, f64) {
    let frequency = if policy_years > 0.0 {
        claims as f64 / policy_years
    } else {
        previous.0
    };
    let severity = if claims > 0 {
        total_claims / claims as f64
    } else {
        previous.1
    };
    (frequency, severity)
}

pub struct IndustryStatistics {
    frequency: f64,
    severity: f64,
    seen: HashSet<(LossId, RiskId)>,
    claims: u64,
    total_claims: f64,
    cover_this_year: f64,
    cover_next_year: f64,
    risks_entered: u64,
    policies_bound: u64,
    premium_sum: f64,
    pub latest_pricing: PricingStatistics,
    pub history: Vec<IndustryYear>,
}

impl IndustryStatistics {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        IndustryStatistics {
            frequency: cfg.initial_claim_frequency,
            severity: cfg.initial_claim_severity,
            seen: HashSet::new(),
            claims: 0,
            total_claims: 0.0,
            cover_this_year: 0.0,
            cover_next_year: 0.0,
            risks_entered: 0,
            policies_bound: 0,
            premium_sum: 0.0,
            latest_pricing: PricingStatistics::default(),
            history: Vec::new(),
        }
    }

    pub fn current(&self) -> (f64, f64) {
        (self.frequency, self.severity)
    }

    fn add_cover(&mut self, bound: SimTime, expiry: SimTime) {
        let boundary = bound.next_year_boundary().min(expiry);
        let year = f64::from(DAYS_PER_YEAR);
        self.cover_this_year += f64::from(boundary.day() - bound.day()) / year;
        self.cover_next_year += f64::from(expiry.day().saturating_sub(boundary.day())) / year;
    }

    fn close_year(&mut self, year: u32) -> IndustryYear {
        let (frequency, severity) = estimate(
            self.claims,
            self.total_claims,
            self.cover_this_year,
            (self.frequency, self.severity),
        );
        self.frequency = frequency;
        self.severity = severity;
        let frame = IndustryYear {
            year,
            claim_frequency: frequency,
            claim_severity: severity,
            claims: self.claims,
            total_claims: self.total_claims,
            policy_years: self.cover_this_year,
            risks_entered: self.risks_entered,
            policies_bound: self.policies_bound,
            mean_bound_premium: if self.policies_bound > 0 {
                self.premium_sum / self.policies_bound as f64
            } else {
                0.0
            },
        };
        self.seen.clear();
        self.claims = 0;
        self.total_claims = 0.0;
        self.cover_this_year = self.cover_next_year;
        self.cover_next_year = 0.0;
        self.risks_entered = 0;
        self.policies_bound = 0;
        self.premium_sum = 0.0;
        frame
    }
}

impl Process<MarketEvent> for IndustryStatistics {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::Year,
            EventKind::RiskBroadcasted,
            EventKind::LeadQuoteAccepted,
            EventKind::ClaimReceived,
            EventKind::IndustryPricingStatisticsReported,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::Year => {
                let frame = self.close_year(ctx.now().year());
                ctx.emit(MarketEvent::IndustryLossStatisticsReported {
                    claim_frequency: frame.claim_frequency,
                    claim_severity: frame.claim_severity,
                });
                self.history.push(frame);
            }
            MarketEvent::RiskBroadcasted(_) => self.risks_entered += 1,
            MarketEvent::LeadQuoteAccepted { risk, price, .. } => {
                self.policies_bound += 1;
                self.premium_sum += price;
                self.add_cover(ctx.now(), risk.expiry);
            }
            MarketEvent::ClaimReceived(c) => {
                if c.signed_line > 0.0 && self.seen.insert((c.loss_id, c.risk_id)) {
                    self.claims += 1;
                    self.total_claims += c.amount / c.signed_line;
                }
            }
            MarketEvent::IndustryPricingStatisticsReported(s) => self.latest_pricing = *s,
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_examples() {
        let (f, s) = estimate(54, 54.0 * 3e6, 540.0, (0.2, 1.0));
        assert!((f - 0.1).abs() < 1e-12);
        assert!((s - 3e6).abs() < 1e-6);
        assert_eq!(estimate(0, 0.0, 540.0, (0.2, 2.5e6)), (0.0, 2.5e6));
        assert_eq!(estimate(0, 0.0, 0.0, (0.2, 2.5e6)), (0.2, 2.5e6));
    }
}
