//! Central risk repository: collects quotes, binds policies at the selection
//! deadlines and cascades losses into per-syndicate claims.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, SimTime};
use crate::events::{
    Claim, EventKind, LossId, LossSource, MarketEvent, PricingStatistics, Quote, RegionId, Risk, RiskId, Role,
    SyndicateId,
};
use crate::losses::allocate_regional_loss;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Policy {
    pub risk: Risk,
    pub premium: f64,
    pub lead: (SyndicateId, f64),
    pub follows: Vec<(SyndicateId, f64)>,
    pub bound_at: SimTime,
}

impl Policy {
    pub fn signed_total(&self) -> f64 {
        self.lead.1 + self.follows.iter().map(|f| f.1).sum::<f64>()
    }

    pub fn shares(&self) -> impl Iterator<Item = (SyndicateId, Role, f64)> + '_ {
        std::iter::once((self.lead.0, Role::Lead, self.lead.1))
            .chain(self.follows.iter().map(|&(s, l)| (s, Role::Follow, l)))
    }

    pub fn covers(&self, day: SimTime) -> bool {
        day >= self.bound_at && day < self.risk.expiry
    }
}

/// Cheapest quote, ties to the lowest syndicate id.
pub fn select_lead(quotes: &[Quote]) -> Option<Quote> {
    quotes
        .iter()
        .copied()
        .min_by(|a, b| a.price.total_cmp(&b.price).then(a.syndicate_id.cmp(&b.syndicate_id)))
}

/// Signs follow lines into the capacity left by the lead, scaling all of them
/// down proportionally when oversubscribed.
pub fn sign_follow_lines(lead_line: f64, requested: &[f64]) -> Vec<f64> {
    let remaining = (1.0 - lead_line).max(0.0);
    let total: f64 = requested.iter().sum();
    if total <= remaining {
        requested.to_vec()
    } else {
        requested.iter().map(|r| r * remaining / total).collect()
    }
}

/// Splits a (limit-capped) loss by signed lines.
pub fn split_loss(loss: f64, limit: f64, lines: &[f64]) -> Vec<f64> {
    let capped = loss.min(limit).max(0.0);
    lines.iter().map(|l| capped * l).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CatastropheRecord {
    pub day: u32,
    pub region: RegionId,
    pub damage_fraction: f64,
    pub policies_hit: usize,
    /// Loss to the bound risks before line shares.
    pub ground_up: f64,
    /// Sum of claims sent to syndicates.
    pub insured: f64,
}

#[derive(Debug)]
struct Pending {
    risk: Risk,
    lead_quotes: Vec<Quote>,
    follow_quotes: Vec<Quote>,
}

#[derive(Debug, Default)]
struct MonthCounters {
    risks: u64,
    bound: u64,
    premium_sum: f64,
    signed_sum: f64,
}

pub struct RiskRepository {
    pending: BTreeMap<RiskId, Pending>,
    in_force: BTreeMap<RiskId, Policy>,
    by_region: Vec<BTreeSet<RiskId>>,
    live: BTreeSet<SyndicateId>,
    month: MonthCounters,
    last_stats: PricingStatistics,
    pub policy_log: Vec<Policy>,
    pub catastrophes: Vec<CatastropheRecord>,
    pub risks_seen: u64,
    pub losses_dropped: u64,
}

impl RiskRepository {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        RiskRepository {
            pending: BTreeMap::new(),
            in_force: BTreeMap::new(),
            by_region: vec![BTreeSet::new(); cfg.num_peril_regions],
            live: (0..cfg.num_syndicates).collect(),
            month: MonthCounters::default(),
            last_stats: PricingStatistics::default(),
            policy_log: Vec::new(),
            catastrophes: Vec::new(),
            risks_seen: 0,
            losses_dropped: 0,
        }
    }

    pub fn in_force(&self) -> impl Iterator<Item = &Policy> {
        self.in_force.values()
    }

    /// Σ limit × line over the syndicate's in-force policies in `region`.
    pub fn exposure(&self, syndicate: SyndicateId, region: RegionId) -> f64 {
        self.by_region[region]
            .iter()
            .filter_map(|id| self.in_force.get(id))
            .flat_map(|p| p.shares().map(move |(s, _, l)| (s, p.risk.limit * l)))
            .filter(|(s, _)| *s == syndicate)
            .map(|(_, e)| e)
            .sum()
    }

    fn bind_lead(&mut self, risk_id: RiskId, ctx: &mut Context<'_, MarketEvent>) {
        let Some(p) = self.pending.get_mut(&risk_id) else {
            return;
        };
        let live = &self.live;
        p.lead_quotes.retain(|q| live.contains(&q.syndicate_id));
        let Some(winner) = select_lead(&p.lead_quotes) else {
            return;
        };
        let policy = Policy {
            risk: p.risk.clone(),
            premium: winner.price,
            lead: (winner.syndicate_id, winner.line_size),
            follows: Vec::new(),
            bound_at: ctx.now(),
        };
        ctx.emit(MarketEvent::LeadQuoteAccepted {
            risk: p.risk.clone(),
            syndicate_id: winner.syndicate_id,
            price: winner.price,
            signed_line: winner.line_size,
        });
        self.by_region[policy.risk.region].insert(risk_id);
        self.in_force.insert(risk_id, policy);
    }

    fn bind_follows(&mut self, risk_id: RiskId, ctx: &mut Context<'_, MarketEvent>) {
        let Some(mut p) = self.pending.remove(&risk_id) else {
            return;
        };
        let Some(policy) = self.in_force.get_mut(&risk_id) else {
            return;
        };
        let live = &self.live;
        p.follow_quotes
            .retain(|q| live.contains(&q.syndicate_id) && q.syndicate_id != policy.lead.0);
        let requested: Vec<f64> = p.follow_quotes.iter().map(|q| q.line_size).collect();
        let signed = sign_follow_lines(policy.lead.1, &requested);
        for (q, line) in p.follow_quotes.iter().zip(signed) {
            policy.follows.push((q.syndicate_id, line));
            ctx.emit(MarketEvent::FollowQuoteAccepted {
                risk: policy.risk.clone(),
                syndicate_id: q.syndicate_id,
                price: policy.premium,
                signed_line: line,
            });
        }
        self.month.bound += 1;
        self.month.premium_sum += policy.premium;
        self.month.signed_sum += policy.signed_total();
        let syndicates = policy.shares().map(|(s, _, _)| s).collect();
        ctx.schedule_at(policy.risk.expiry, MarketEvent::PolicyExpired { risk_id, syndicates });
        self.policy_log.push(policy.clone());
    }

    fn cascade(&self, loss_id: LossId, policy: &Policy, loss: f64, source: LossSource, ctx: &mut Context<'_, MarketEvent>) -> f64 {
        let capped = loss.min(policy.risk.limit);
        let mut paid = 0.0;
        for (syndicate_id, role, line) in policy.shares() {
            if !self.live.contains(&syndicate_id) {
                continue;
            }
            let amount = capped * line;
            paid += amount;
            ctx.emit(MarketEvent::ClaimReceived(Claim {
                loss_id,
                risk_id: policy.risk.id,
                syndicate_id,
                role,
                amount,
                signed_line: line,
                source,
            }));
        }
        paid
    }

    fn monthly_statistics(&mut self) -> PricingStatistics {
        let m = std::mem::take(&mut self.month);
        let stats = if m.bound > 0 {
            PricingStatistics {
                risks_broadcast: m.risks,
                policies_bound: m.bound,
                mean_bound_premium: m.premium_sum / m.bound as f64,
                mean_signed_total: m.signed_sum / m.bound as f64,
                carried_forward: false,
            }
        } else {
            PricingStatistics {
                risks_broadcast: m.risks,
                policies_bound: 0,
                carried_forward: true,
                ..self.last_stats
            }
        };
        self.last_stats = stats;
        stats
    }
}

impl Process<MarketEvent> for RiskRepository {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::Month,
            EventKind::RiskBroadcasted,
            EventKind::LeadQuoteOffered,
            EventKind::FollowQuoteOffered,
            EventKind::LeadQuoteSelectionDeadlineReached,
            EventKind::FollowQuoteSelectionDeadlineReached,
            EventKind::PolicyExpired,
            EventKind::AttritionalLossOccurred,
            EventKind::CatastropheLossOccurred,
            EventKind::SyndicateBankrupted,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::Month => {
                let stats = self.monthly_statistics();
                ctx.emit(MarketEvent::IndustryPricingStatisticsReported(stats));
            }
            MarketEvent::RiskBroadcasted(risk) => {
                self.risks_seen += 1;
                self.month.risks += 1;
                self.pending.insert(
                    risk.id,
                    Pending {
                        risk: risk.clone(),
                        lead_quotes: Vec::new(),
                        follow_quotes: Vec::new(),
                    },
                );
            }
            MarketEvent::LeadQuoteOffered(q) => {
                if let Some(p) = self.pending.get_mut(&q.risk_id) {
                    if !self.in_force.contains_key(&q.risk_id) {
                        p.lead_quotes.push(*q);
                    }
                }
            }
            MarketEvent::FollowQuoteOffered(q) => {
                if let Some(p) = self.pending.get_mut(&q.risk_id) {
                    p.follow_quotes.push(*q);
                }
            }
            MarketEvent::LeadQuoteSelectionDeadlineReached { risk_id } => self.bind_lead(*risk_id, ctx),
            MarketEvent::FollowQuoteSelectionDeadlineReached { risk_id } => self.bind_follows(*risk_id, ctx),
            MarketEvent::PolicyExpired { risk_id, .. } => {
                if let Some(p) = self.in_force.remove(risk_id) {
                    self.by_region[p.risk.region].remove(risk_id);
                }
            }
            MarketEvent::AttritionalLossOccurred { loss_id, risk_id, amount } => {
                match self.in_force.get(risk_id) {
                    Some(policy) if policy.covers(ctx.now()) => {
                        self.cascade(*loss_id, policy, *amount, LossSource::Attritional, ctx);
                    }
                    _ => self.losses_dropped += 1,
                }
            }
            MarketEvent::CatastropheLossOccurred { loss_id, region, damage_fraction } => {
                let now = ctx.now();
                let hit: Vec<&Policy> = self.by_region[*region]
                    .iter()
                    .filter_map(|id| self.in_force.get(id))
                    .filter(|p| p.covers(now))
                    .collect();
                let limits: Vec<f64> = hit.iter().map(|p| p.risk.limit).collect();
                let ground_up = damage_fraction * limits.iter().sum::<f64>();
                let (losses, _) = allocate_regional_loss(ground_up, &limits);
                let mut insured = 0.0;
                for (policy, loss) in hit.iter().zip(losses) {
                    insured += self.cascade(*loss_id, policy, loss, LossSource::Catastrophe, ctx);
                }
                self.catastrophes.push(CatastropheRecord {
                    day: now.day(),
                    region: *region,
                    damage_fraction: *damage_fraction,
                    policies_hit: hit.len(),
                    ground_up,
                    insured,
                });
            }
            MarketEvent::SyndicateBankrupted { syndicate_id } => {
                self.live.remove(syndicate_id);
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quote(syndicate_id: SyndicateId, price: f64) -> Quote {
        Quote {
            risk_id: 1,
            syndicate_id,
            role: Role::Lead,
            price,
            line_size: 0.5,
        }
    }

    #[test]
    fn cheapest_lead_wins() {
        let q = [quote(0, 310_000.0), quote(1, 295_000.0), quote(2, 305_000.0)];
        assert_eq!(select_lead(&q).unwrap().syndicate_id, 1);
        assert!(select_lead(&[]).is_none());
        let tie = [quote(3, 300_000.0), quote(1, 300_000.0)];
        assert_eq!(select_lead(&tie).unwrap().syndicate_id, 1);
    }

    #[test]
    fn follow_sign_down() {
        assert_eq!(sign_follow_lines(0.5, &[0.1; 5]), vec![0.1; 5]);
        let signed = sign_follow_lines(0.5, &[0.1; 7]);
        for s in &signed {
            assert!((s - 0.5 / 0.7 * 0.1).abs() < 1e-9);
            assert!((s - 0.0714286).abs() < 1e-7);
        }
        assert!((0.5 + signed.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(sign_follow_lines(0.5, &[]).is_empty());
    }

    #[test]
    fn loss_split_examples() {
        assert_eq!(split_loss(1_000_000.0, 10_000_000.0, &[0.5, 0.1]), vec![500_000.0, 100_000.0]);
        assert_eq!(split_loss(15_000_000.0, 10_000_000.0, &[1.0]), vec![10_000_000.0]);
    }

    proptest! {
        #[test]
        fn signed_lines_never_exceed_capacity(lead in 0.01f64..1.0, req in prop::collection::vec(0.001f64..1.0, 0..12)) {
            let signed = sign_follow_lines(lead, &req);
            prop_assert!(lead + signed.iter().sum::<f64>() <= 1.0 + 1e-9);
            prop_assert!(signed.iter().zip(&req).all(|(s, r)| *s > 0.0 && *s <= *r + 1e-15));
        }

        #[test]
        fn lead_choice_scale_invariant(prices in prop::collection::vec(1.0f64..1e6, 1..8), scale in 0.01f64..100.0) {
            let q: Vec<Quote> = prices.iter().enumerate().map(|(i, &p)| quote(i, p)).collect();
            let scaled: Vec<Quote> = q.iter().map(|x| Quote { price: x.price * scale, ..*x }).collect();
            prop_assert_eq!(select_lead(&q).unwrap().syndicate_id, select_lead(&scaled).unwrap().syndicate_id);
        }

        #[test]
        fn claims_conserve_capped_loss(loss in 0.0f64..5e7, lines in prop::collection::vec(0.01f64..0.2, 1..6)) {
            let claims = split_loss(loss, 1e7, &lines);
            let total: f64 = claims.iter().sum();
            let expected = loss.min(1e7) * lines.iter().sum::<f64>();
            prop_assert!((total - expected).abs() <= 1e-6 * expected.max(1.0));
        }
    }
}
