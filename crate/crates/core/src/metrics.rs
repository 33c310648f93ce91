//! Yearly per-syndicate frames built from the event stream.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::des::{Context, Process};
use crate::events::{EventKind, MarketEvent, SyndicateId, SyndicateSnapshot};

/// Total-variation distance between the portfolio's regional distribution
/// and the uniform one. An empty portfolio counts as uniform.
pub fn uniform_deviation(counts: &[u32]) -> f64 {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 || counts.is_empty() {
        return 0.0;
    }
    let n = counts.len() as f64;
    0.5 * counts
        .iter()
        .map(|&c| (f64::from(c) / total as f64 - 1.0 / n).abs())
        .sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearFrame {
    pub year: u32,
    pub syndicate_id: SyndicateId,
    pub capital: f64,
    pub premiums_offered_mean: Option<f64>,
    pub premiums_earned: f64,
    pub claims_paid: f64,
    pub loss_ratio: Option<f64>,
    pub insolvent: bool,
    pub uniform_deviation: f64,
    pub policies_in_force: u32,
}

#[derive(Clone, Debug, Default)]
struct Running {
    premiums_total: f64,
    claims_total: f64,
}

pub struct MetricsCollector {
    offers: BTreeMap<(SyndicateId, u32), (f64, u64)>,
    running: Vec<Running>,
    closed: BTreeSet<SyndicateId>,
    /// Final snapshot per syndicate: at the end of the run or at failure.
    pub last_snapshot: Vec<Option<SyndicateSnapshot>>,
    pub frames: Vec<YearFrame>,
}

impl MetricsCollector {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        MetricsCollector {
            offers: BTreeMap::new(),
            running: vec![Running::default(); cfg.num_syndicates],
            closed: BTreeSet::new(),
            last_snapshot: vec![None; cfg.num_syndicates],
            frames: Vec::new(),
        }
    }

    fn frame(&mut self, syndicate_id: SyndicateId, year: u32, s: &SyndicateSnapshot, insolvent: bool) {
        let prev = std::mem::replace(
            &mut self.running[syndicate_id],
            Running {
                premiums_total: s.premiums_total,
                claims_total: s.claims_total,
            },
        );
        let premiums_earned = s.premiums_total - prev.premiums_total;
        let claims_paid = s.claims_total - prev.claims_total;
        let premiums_offered_mean = self
            .offers
            .remove(&(syndicate_id, year))
            .map(|(sum, n)| sum / n as f64);
        self.frames.push(YearFrame {
            year,
            syndicate_id,
            capital: s.capital,
            premiums_offered_mean,
            premiums_earned,
            claims_paid,
            loss_ratio: (premiums_earned > 0.0).then(|| claims_paid / premiums_earned),
            insolvent,
            uniform_deviation: uniform_deviation(&s.region_policies),
            policies_in_force: s.region_policies.iter().sum(),
        });
    }
}

impl Process<MarketEvent> for MetricsCollector {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::LeadQuoteOffered,
            EventKind::FollowQuoteOffered,
            EventKind::SyndicateCapitalReported,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::LeadQuoteOffered(q) | MarketEvent::FollowQuoteOffered(q) => {
                let year = ctx.now().year() + 1;
                let e = self.offers.entry((q.syndicate_id, year)).or_insert((0.0, 0));
                e.0 += q.price;
                e.1 += 1;
            }
            MarketEvent::SyndicateCapitalReported { syndicate_id, snapshot } => {
                let id = *syndicate_id;
                if self.closed.contains(&id) {
                    return;
                }
                self.last_snapshot[id] = Some(snapshot.clone());
                if snapshot.insolvent {
                    self.closed.insert(id);
                    self.frame(id, ctx.now().year() + 1, snapshot, true);
                } else if let Some(year) = snapshot.closed_year {
                    self.frame(id, year, snapshot, false);
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deviation_examples() {
        assert_eq!(uniform_deviation(&[7; 10]), 0.0);
        let mut one = [0u32; 10];
        one[4] = 13;
        assert!((uniform_deviation(&one) - 0.9).abs() < 1e-12);
        assert_eq!(uniform_deviation(&[0; 10]), 0.0);
    }

    proptest! {
        #[test]
        fn deviation_in_unit_interval(counts in prop::collection::vec(0u32..1000, 1..20)) {
            let d = uniform_deviation(&counts);
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
