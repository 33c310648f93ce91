//! Brokers bring a Poisson number of new risks to market every day and set
//! the four quote deadlines for each.

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, RngStreams, SimRng, SimTime, DAYS_PER_YEAR};
use crate::events::{BrokerId, EventKind, MarketEvent, Risk, RiskId};
use crate::losses::sample_poisson;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuoteDeadlines {
    pub lead_consolidation: SimTime,
    pub lead_selection: SimTime,
    pub follow_consolidation: SimTime,
    pub follow_selection: SimTime,
}

impl QuoteDeadlines {
    pub fn after(broadcast: SimTime, cfg: &ScenarioConfig) -> Self {
        QuoteDeadlines {
            lead_consolidation: broadcast.plus_days(cfg.lead_consolidation_offset),
            lead_selection: broadcast.plus_days(cfg.lead_selection_offset),
            follow_consolidation: broadcast.plus_days(cfg.follow_consolidation_offset),
            follow_selection: broadcast.plus_days(cfg.follow_selection_offset),
        }
    }
}

pub struct Broker {
    pub id: BrokerId,
    num_brokers: usize,
    risks_per_day: f64,
    num_regions: usize,
    limit: f64,
    cfg: ScenarioConfig,
    rng: SimRng,
    issued: u64,
}

impl Broker {
    pub fn new(id: BrokerId, cfg: &ScenarioConfig, streams: &RngStreams) -> Self {
        Broker {
            id,
            num_brokers: cfg.num_brokers,
            risks_per_day: cfg.risks_per_day,
            num_regions: cfg.num_peril_regions,
            limit: cfg.risk_limit,
            cfg: cfg.clone(),
            rng: streams.stream(&format!("broker/{id}")),
            issued: 0,
        }
    }

    pub fn risks_issued(&self) -> u64 {
        self.issued
    }

    /// Risk ids interleave brokers so they are unique without coordination.
    fn next_risk_id(&mut self) -> RiskId {
        let id = self.issued * self.num_brokers as u64 + self.id as u64;
        self.issued += 1;
        id
    }

    /// Draws today's risks.
    pub fn new_risks(&mut self, today: SimTime) -> Vec<Risk> {
        let n = sample_poisson(&mut self.rng, self.risks_per_day);
        (0..n)
            .map(|_| {
                let region = self.rng.random_range(0..self.num_regions);
                Risk {
                    id: self.next_risk_id(),
                    broker_id: self.id,
                    inception: today,
                    expiry: today.plus_days(DAYS_PER_YEAR),
                    limit: self.limit,
                    region,
                }
            })
            .collect()
    }
}

impl Process<MarketEvent> for Broker {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::Day]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        if !matches!(event, MarketEvent::Day) {
            return;
        }
        let today = ctx.now();
        for risk in self.new_risks(today) {
            let d = QuoteDeadlines::after(today, &self.cfg);
            let risk_id = risk.id;
            ctx.emit(MarketEvent::RiskBroadcasted(risk));
            ctx.schedule_at(d.lead_consolidation, MarketEvent::LeadQuoteConsolidationDeadlineReached { risk_id });
            ctx.schedule_at(d.lead_selection, MarketEvent::LeadQuoteSelectionDeadlineReached { risk_id });
            ctx.schedule_at(d.follow_consolidation, MarketEvent::FollowQuoteConsolidationDeadlineReached { risk_id });
            ctx.schedule_at(d.follow_selection, MarketEvent::FollowQuoteSelectionDeadlineReached { risk_id });
        }
    }
}
