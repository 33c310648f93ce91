//! Event vocabulary of the market and the records the events carry.

use serde::{Deserialize, Serialize};

use crate::des::{SimEvent, SimTime};

pub type RiskId = u64;
pub type SyndicateId = usize;
pub type BrokerId = usize;
pub type RegionId = usize;
pub type LossId = u64;

/// A risk brought to market by a broker. Every risk runs for one year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Risk {
    pub id: RiskId,
    pub broker_id: BrokerId,
    pub inception: SimTime,
    pub expiry: SimTime,
    pub limit: f64,
    pub region: RegionId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Lead,
    Follow,
}

/// An offer registered with the central risk repository.
///
/// For follow quotes `price` is the follower's own view of the price; the
/// bound premium is always the lead's.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub risk_id: RiskId,
    pub syndicate_id: SyndicateId,
    pub role: Role,
    pub price: f64,
    pub line_size: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossSource {
    Attritional,
    Catastrophe,
}

/// One syndicate's share of one loss on one policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub loss_id: LossId,
    pub risk_id: RiskId,
    pub syndicate_id: SyndicateId,
    pub role: Role,
    pub amount: f64,
    pub signed_line: f64,
    pub source: LossSource,
}

/// Output of one syndicate sub-process for one quote request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum QuoteComponent {
    /// Actuarial price at 100% share.
    ActuarialPrice(f64),
    /// Underwriter multiplier `e^m`.
    Markup(f64),
    /// Premium exposure management scaling factor, or `None` for a veto.
    PremiumScaling(Option<f64>),
    /// VaR exposure management verdict (`true` allows the quote).
    VarVerdict(bool),
}

/// State a syndicate shares with its sub-processes and the metrics sink.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndicateSnapshot {
    pub capital: f64,
    pub premiums_written_ytd: f64,
    pub premiums_total: f64,
    pub claims_total: f64,
    pub dividends_total: f64,
    /// Sum of `limit * signed_line` over in-force policies, per region.
    pub region_exposure: Vec<f64>,
    /// In-force policy count per region.
    pub region_policies: Vec<u32>,
    /// Policy-years (at the syndicate's own shares normalised to whole
    /// risks) falling inside the current calendar year.
    pub exposure_years_ytd: f64,
    /// Set on the report issued right after a year-end close.
    pub closed_year: Option<u32>,
    /// Set on the final report of a failed syndicate.
    pub insolvent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MarketEvent {
    SimulationStarted,
    Day,
    Month,
    Year,

    RiskBroadcasted(Risk),
    LeadQuoteRequested { risk: Risk, syndicate_id: SyndicateId },
    FollowQuoteRequested { risk: Risk, syndicate_id: SyndicateId },
    LeadQuoteConsolidationDeadlineReached { risk_id: RiskId },
    LeadQuoteSelectionDeadlineReached { risk_id: RiskId },
    FollowQuoteConsolidationDeadlineReached { risk_id: RiskId },
    FollowQuoteSelectionDeadlineReached { risk_id: RiskId },

    /// Parent syndicate asking its sub-processes to price a request.
    QuoteRequested { syndicate_id: SyndicateId, risk: Risk, role: Role },
    QuoteComponentComputed {
        syndicate_id: SyndicateId,
        risk_id: RiskId,
        role: Role,
        component: QuoteComponent,
    },

    LeadQuoteOffered(Quote),
    FollowQuoteOffered(Quote),
    LeadQuoteAccepted { risk: Risk, syndicate_id: SyndicateId, price: f64, signed_line: f64 },
    FollowQuoteAccepted { risk: Risk, syndicate_id: SyndicateId, price: f64, signed_line: f64 },
    PolicyExpired { risk_id: RiskId, syndicates: Vec<SyndicateId> },

    AttritionalLossOccurred { loss_id: LossId, risk_id: RiskId, amount: f64 },
    /// `damage_fraction` of every in-force limit in `region` is lost.
    CatastropheLossOccurred { loss_id: LossId, region: RegionId, damage_fraction: f64 },
    ClaimReceived(Claim),

    SyndicateCapitalReported { syndicate_id: SyndicateId, snapshot: SyndicateSnapshot },
    SyndicateBankrupted { syndicate_id: SyndicateId },

    IndustryLossStatisticsReported { claim_frequency: f64, claim_severity: f64 },
    IndustryPricingStatisticsReported(PricingStatistics),
}

/// Monthly summary of repository activity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PricingStatistics {
    pub risks_broadcast: u64,
    pub policies_bound: u64,
    pub mean_bound_premium: f64,
    pub mean_signed_total: f64,
    /// True when no policy was bound this month and the means were carried
    /// over from the previous report.
    pub carried_forward: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    SimulationStarted,
    Day,
    Month,
    Year,
    RiskBroadcasted,
    LeadQuoteRequested,
    FollowQuoteRequested,
    LeadQuoteConsolidationDeadlineReached,
    LeadQuoteSelectionDeadlineReached,
    FollowQuoteConsolidationDeadlineReached,
    FollowQuoteSelectionDeadlineReached,
    QuoteRequested,
    QuoteComponentComputed,
    LeadQuoteOffered,
    FollowQuoteOffered,
    LeadQuoteAccepted,
    FollowQuoteAccepted,
    PolicyExpired,
    AttritionalLossOccurred,
    CatastropheLossOccurred,
    ClaimReceived,
    SyndicateCapitalReported,
    SyndicateBankrupted,
    IndustryLossStatisticsReported,
    IndustryPricingStatisticsReported,
}

/// Same-day priority tiers.
pub mod tier {
    pub const DAY: u8 = 0;
    pub const MONTH: u8 = 1;
    pub const YEAR: u8 = 2;
    pub const LOSS: u8 = 3;
    pub const QUOTE: u8 = 4;
    pub const STATISTICS: u8 = 5;
}

impl SimEvent for MarketEvent {
    type Kind = EventKind;

    fn kind(&self) -> EventKind {
        use MarketEvent as E;
        match self {
            E::SimulationStarted => EventKind::SimulationStarted,
            E::Day => EventKind::Day,
            E::Month => EventKind::Month,
            E::Year => EventKind::Year,
            E::RiskBroadcasted(_) => EventKind::RiskBroadcasted,
            E::LeadQuoteRequested { .. } => EventKind::LeadQuoteRequested,
            E::FollowQuoteRequested { .. } => EventKind::FollowQuoteRequested,
            E::LeadQuoteConsolidationDeadlineReached { .. } => {
                EventKind::LeadQuoteConsolidationDeadlineReached
            }
            E::LeadQuoteSelectionDeadlineReached { .. } => {
                EventKind::LeadQuoteSelectionDeadlineReached
            }
            E::FollowQuoteConsolidationDeadlineReached { .. } => {
                EventKind::FollowQuoteConsolidationDeadlineReached
            }
            E::FollowQuoteSelectionDeadlineReached { .. } => {
                EventKind::FollowQuoteSelectionDeadlineReached
            }
            E::QuoteRequested { .. } => EventKind::QuoteRequested,
            E::QuoteComponentComputed { .. } => EventKind::QuoteComponentComputed,
            E::LeadQuoteOffered(_) => EventKind::LeadQuoteOffered,
            E::FollowQuoteOffered(_) => EventKind::FollowQuoteOffered,
            E::LeadQuoteAccepted { .. } => EventKind::LeadQuoteAccepted,
            E::FollowQuoteAccepted { .. } => EventKind::FollowQuoteAccepted,
            E::PolicyExpired { .. } => EventKind::PolicyExpired,
            E::AttritionalLossOccurred { .. } => EventKind::AttritionalLossOccurred,
            E::CatastropheLossOccurred { .. } => EventKind::CatastropheLossOccurred,
            E::ClaimReceived(_) => EventKind::ClaimReceived,
            E::SyndicateCapitalReported { .. } => EventKind::SyndicateCapitalReported,
            E::SyndicateBankrupted { .. } => EventKind::SyndicateBankrupted,
            E::IndustryLossStatisticsReported { .. } => EventKind::IndustryLossStatisticsReported,
            E::IndustryPricingStatisticsReported(_) => {
                EventKind::IndustryPricingStatisticsReported
            }
        }
    }

    fn tier(&self) -> u8 {
        use EventKind as K;
        match self.kind() {
            K::SimulationStarted | K::Day => tier::DAY,
            K::Month => tier::MONTH,
            K::Year => tier::YEAR,
            K::AttritionalLossOccurred
            | K::CatastropheLossOccurred
            | K::ClaimReceived
            | K::SyndicateBankrupted => tier::LOSS,
            K::IndustryLossStatisticsReported | K::IndustryPricingStatisticsReported => {
                tier::STATISTICS
            }
            _ => tier::QUOTE,
        }
    }

    fn summary(&self) -> String {
        use MarketEvent as E;
        match self {
            E::SimulationStarted | E::Day | E::Month | E::Year => String::new(),
            E::RiskBroadcasted(r) => format!(
                "risk={} broker={} region={} limit={}",
                r.id, r.broker_id, r.region, r.limit
            ),
            E::LeadQuoteRequested { risk, syndicate_id }
            | E::FollowQuoteRequested { risk, syndicate_id } => {
                format!("risk={} syndicate={syndicate_id}", risk.id)
            }
            E::LeadQuoteConsolidationDeadlineReached { risk_id }
            | E::LeadQuoteSelectionDeadlineReached { risk_id }
            | E::FollowQuoteConsolidationDeadlineReached { risk_id }
            | E::FollowQuoteSelectionDeadlineReached { risk_id } => format!("risk={risk_id}"),
            E::QuoteRequested { syndicate_id, risk, role } => {
                format!("risk={} syndicate={syndicate_id} role={role:?}", risk.id)
            }
            E::QuoteComponentComputed { syndicate_id, risk_id, role, component } => {
                format!("risk={risk_id} syndicate={syndicate_id} role={role:?} {component:?}")
            }
            E::LeadQuoteOffered(q) | E::FollowQuoteOffered(q) => format!(
                "risk={} syndicate={} price={} line={}",
                q.risk_id, q.syndicate_id, q.price, q.line_size
            ),
            E::LeadQuoteAccepted { risk, syndicate_id, price, signed_line }
            | E::FollowQuoteAccepted { risk, syndicate_id, price, signed_line } => format!(
                "risk={} syndicate={syndicate_id} price={price} line={signed_line}",
                risk.id
            ),
            E::PolicyExpired { risk_id, syndicates } => {
                let ids: Vec<String> = syndicates.iter().map(ToString::to_string).collect();
                format!("risk={risk_id} syndicates={}", ids.join(";"))
            }
            E::AttritionalLossOccurred { loss_id, risk_id, amount } => {
                format!("loss={loss_id} risk={risk_id} amount={amount}")
            }
            E::CatastropheLossOccurred { loss_id, region, damage_fraction } => {
                format!("loss={loss_id} region={region} damage={damage_fraction}")
            }
            E::ClaimReceived(c) => format!(
                "loss={} risk={} syndicate={} amount={} line={}",
                c.loss_id, c.risk_id, c.syndicate_id, c.amount, c.signed_line
            ),
            E::SyndicateCapitalReported { syndicate_id, snapshot } => {
                format!("syndicate={syndicate_id} capital={}", snapshot.capital)
            }
            E::SyndicateBankrupted { syndicate_id } => format!("syndicate={syndicate_id}"),
            E::IndustryLossStatisticsReported { claim_frequency, claim_severity } => {
                format!("frequency={claim_frequency} severity={claim_severity}")
            }
            E::IndustryPricingStatisticsReported(s) => format!(
                "risks={} bound={} mean_premium={}",
                s.risks_broadcast, s.policies_bound, s.mean_bound_premium
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_tiers_precede_losses_then_quotes_then_statistics() {
        let order = [
            MarketEvent::Day.tier(),
            MarketEvent::Month.tier(),
            MarketEvent::Year.tier(),
            MarketEvent::AttritionalLossOccurred { loss_id: 0, risk_id: 0, amount: 1.0 }.tier(),
            MarketEvent::LeadQuoteSelectionDeadlineReached { risk_id: 0 }.tier(),
            MarketEvent::IndustryLossStatisticsReported { claim_frequency: 0.1, claim_severity: 1.0 }
                .tier(),
        ];
        assert!(order.windows(2).all(|w| w[0] < w[1]), "{order:?}");
    }
}
