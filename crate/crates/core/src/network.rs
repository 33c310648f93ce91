//! Broker–syndicate network: decides which syndicates are asked to lead or
//! follow each risk.
//!
//! - `Circular`: brokers and syndicates sit at random points on a unit
//!   circle; a broker asks its nearest syndicates.
//! - `Graph`: every broker–syndicate pair has a static weight in `(0, 1]`;
//!   a broker asks its heaviest edges.
//! - `Random`: a fresh uniform choice for every risk.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{ScenarioConfig, TopologyKind};
use crate::des::{Context, Process, RngStreams, SimRng};
use crate::events::{BrokerId, EventKind, MarketEvent, SyndicateId};

#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Circular { brokers: Vec<f64>, syndicates: Vec<f64> },
    Graph { weights: Vec<Vec<f64>> },
    Random { num_syndicates: usize },
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Ids of the `k` best-scoring candidates, lowest score first, ties to the
/// lower id.
pub fn best_k(mut scored: Vec<(SyndicateId, f64)>, k: usize) -> Vec<SyndicateId> {
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(k).map(|(id, _)| id).collect()
}

impl Topology {
    pub fn build<R: Rng + ?Sized>(kind: TopologyKind, num_brokers: usize, num_syndicates: usize, rng: &mut R) -> Self {
        match kind {
            TopologyKind::Circular => Topology::Circular {
                brokers: (0..num_brokers).map(|_| rng.random()).collect(),
                syndicates: (0..num_syndicates).map(|_| rng.random()).collect(),
            },
            TopologyKind::Graph => Topology::Graph {
                weights: (0..num_brokers)
                    .map(|_| (0..num_syndicates).map(|_| 1.0 - rng.random::<f64>()).collect())
                    .collect(),
            },
            TopologyKind::Random => Topology::Random { num_syndicates },
        }
    }

    pub fn num_syndicates(&self) -> usize {
        match self {
            Topology::Circular { syndicates, .. } => syndicates.len(),
            Topology::Graph { weights } => weights.first().map_or(0, Vec::len),
            Topology::Random { num_syndicates } => *num_syndicates,
        }
    }

    /// Up to `k` distinct eligible syndicates for `broker`.
    pub fn select<R: Rng + ?Sized>(
        &self,
        broker: BrokerId,
        k: usize,
        eligible: impl Fn(SyndicateId) -> bool,
        rng: &mut R,
    ) -> Vec<SyndicateId> {
        match self {
            Topology::Circular { brokers, syndicates } => {
                let at = brokers[broker];
                let scored = syndicates
                    .iter()
                    .enumerate()
                    .filter(|(id, _)| eligible(*id))
                    .map(|(id, &pos)| (id, circle_distance(at, pos)))
                    .collect();
                best_k(scored, k)
            }
            Topology::Graph { weights } => {
                let scored = weights[broker]
                    .iter()
                    .enumerate()
                    .filter(|(id, _)| eligible(*id))
                    .map(|(id, &w)| (id, -w))
                    .collect();
                best_k(scored, k)
            }
            Topology::Random { num_syndicates } => {
                // Shuffle everyone so the number of draws does not depend on
                // who is still alive.
                let mut order: Vec<SyndicateId> = (0..*num_syndicates).collect();
                order.shuffle(rng);
                order.into_iter().filter(|&id| eligible(id)).take(k).collect()
            }
        }
    }
}

pub struct Network {
    pub topology: Topology,
    lead_top_k: usize,
    follow_top_k: usize,
    live: BTreeSet<SyndicateId>,
    rng: SimRng,
}

impl Network {
    pub fn new(cfg: &ScenarioConfig, streams: &RngStreams) -> Self {
        let mut topo_rng = streams.stream("topology");
        Network {
            topology: Topology::build(cfg.topology, cfg.num_brokers, cfg.num_syndicates, &mut topo_rng),
            lead_top_k: cfg.lead_top_k,
            follow_top_k: cfg.effective_follow_top_k(),
            live: (0..cfg.num_syndicates).collect(),
            rng: streams.stream("network"),
        }
    }

    pub fn live(&self) -> &BTreeSet<SyndicateId> {
        &self.live
    }

    pub fn select_leads(&mut self, broker: BrokerId) -> Vec<SyndicateId> {
        let live = &self.live;
        self.topology
            .select(broker, self.lead_top_k, |id| live.contains(&id), &mut self.rng)
    }

    /// Follow candidates exclude the risk's lead candidates.
    pub fn select_follows(&mut self, broker: BrokerId, leads: &[SyndicateId]) -> Vec<SyndicateId> {
        if self.follow_top_k == 0 {
            return Vec::new();
        }
        let live = &self.live;
        self.topology.select(
            broker,
            self.follow_top_k,
            |id| live.contains(&id) && !leads.contains(&id),
            &mut self.rng,
        )
    }
}

impl Process<MarketEvent> for Network {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::RiskBroadcasted, EventKind::SyndicateBankrupted]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        match event {
            MarketEvent::RiskBroadcasted(risk) => {
                let leads = self.select_leads(risk.broker_id);
                let follows = self.select_follows(risk.broker_id, &leads);
                for syndicate_id in leads {
                    ctx.emit(MarketEvent::LeadQuoteRequested {
                        risk: risk.clone(),
                        syndicate_id,
                    });
                }
                for syndicate_id in follows {
                    ctx.emit(MarketEvent::FollowQuoteRequested {
                        risk: risk.clone(),
                        syndicate_id,
                    });
                }
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

    fn rng() -> SimRng {
        RngStreams::new(11).stream("t")
    }

    #[test]
    fn random_picks_distinct_ids() {
        let t = Topology::Random { num_syndicates: 5 };
        let mut r = rng();
        for _ in 0..100 {
            let s = t.select(0, 2, |_| true, &mut r);
            assert_eq!(s.len(), 2);
            assert_ne!(s[0], s[1]);
        }
    }

    #[test]
    fn circular_picks_nearest() {
        let t = Topology::Circular {
            brokers: vec![0.0],
            syndicates: vec![0.3, 0.1, 0.2],
        };
        assert_eq!(t.select(0, 2, |_| true, &mut rng()), vec![1, 2]);
    }

    #[test]
    fn circular_distance_wraps() {
        assert!((circle_distance(0.95, 0.05) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn graph_picks_heaviest() {
        let t = Topology::Graph {
            weights: vec![vec![0.2, 0.9, 0.5, 0.9]],
        };
        assert_eq!(t.select(0, 3, |_| true, &mut rng()), vec![1, 3, 2]);
    }

    #[test]
    fn clamps_to_live_syndicates() {
        let t = Topology::Random { num_syndicates: 5 };
        let mut r = rng();
        assert_eq!(t.select(0, 2, |id| id == 3, &mut r), vec![3]);
        assert_eq!(t.select(0, 5, |id| id != 1 && id != 4, &mut r).len(), 3);
        assert!(t.select(0, 2, |_| false, &mut r).is_empty());
    }

    #[test]
    fn follow_lists_exclude_leads_and_respect_zero_k() {
        let cfg = ScenarioConfig::preset(crate::config::Preset::Scenario4);
        let mut n = Network::new(&cfg, &RngStreams::new(3));
        let leads = n.select_leads(0);
        let follows = n.select_follows(0, &leads);
        assert_eq!(follows.len(), 3);
        assert!(follows.iter().all(|f| !leads.contains(f)));

        let cfg1 = ScenarioConfig::preset(crate::config::Preset::Scenario1);
        let mut n1 = Network::new(&cfg1, &RngStreams::new(3));
        assert!(n1.select_follows(0, &[]).is_empty());
    }

    #[test]
    fn random_topology_is_balanced() {
        let t = Topology::Random { num_syndicates: 5 };
        let mut r = rng();
        let mut counts = [0usize; 5];
        let risks = 10_000;
        for _ in 0..risks {
            for id in t.select(0, 2, |_| true, &mut r) {
                counts[id] += 1;
            }
        }
        let expected = risks as f64 * 2.0 / 5.0;
        for c in counts {
            assert!((c as f64 - expected).abs() / expected < 0.05, "{counts:?}");
        }
    }

    proptest! {
        #[test]
        fn selections_distinct_eligible_bounded(seed in any::<u64>(), k in 0usize..8, mask in 0u32..32, kind in 0u8..3) {
            let kind = [TopologyKind::Circular, TopologyKind::Graph, TopologyKind::Random][kind as usize];
            let mut r = RngStreams::new(seed).stream("p");
            let t = Topology::build(kind, 3, 5, &mut r);
            let eligible = |id: usize| mask & (1 << id) != 0;
            let s = t.select(1, k, eligible, &mut r);
            let live = (0..5).filter(|&i| eligible(i)).count();
            prop_assert_eq!(s.len(), k.min(live));
            let set: BTreeSet<_> = s.iter().copied().collect();
            prop_assert_eq!(set.len(), s.len());
            prop_assert!(s.iter().all(|&id| eligible(id)));
        }

        #[test]
        fn deterministic_topologies_are_pure(seed in any::<u64>(), graph in any::<bool>()) {
            let kind = if graph { TopologyKind::Graph } else { TopologyKind::Circular };
            let t = Topology::build(kind, 4, 5, &mut RngStreams::new(seed).stream("p"));
            let a = t.select(2, 3, |_| true, &mut RngStreams::new(1).stream("x"));
            let b = t.select(2, 3, |_| true, &mut RngStreams::new(2).stream("x"));
            prop_assert_eq!(a, b);
        }
    }
}
