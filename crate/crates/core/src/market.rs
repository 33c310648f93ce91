//! Assembles a full market on the event engine and runs one replication.

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::des::{ticks_for, Context, Engine, Process, ProcessId, RngStreams, RunStats, SimTime, Tick, TraceRecord};
use crate::error::SimError;
use crate::events::{EventKind, MarketEvent, SyndicateSnapshot};
use crate::exposure::{PremiumExposureManager, VarExposureManager};
use crate::industry::{IndustryStatistics, IndustryYear};
use crate::losses::{AttritionalLossGenerator, CatastropheLossGenerator};
use crate::metrics::{MetricsCollector, YearFrame};
use crate::network::Network;
use crate::pricing::{ActuarialPricer, Underwriter};
use crate::repository::{CatastropheRecord, Policy, RiskRepository};
use crate::syndicate::Syndicate;
use crate::broker::Broker;

/// Drives the calendar: each `Day` schedules the next day's ticks.
pub struct Timekeeper {
    horizon: SimTime,
}

impl Timekeeper {
    pub fn new(horizon: SimTime) -> Self {
        Timekeeper { horizon }
    }
}

pub fn tick_event(tick: Tick) -> MarketEvent {
    match tick {
        Tick::Day => MarketEvent::Day,
        Tick::Month => MarketEvent::Month,
        Tick::Year => MarketEvent::Year,
    }
}

impl Process<MarketEvent> for Timekeeper {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::Day]
    }

    fn handle(&mut self, _event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        let next = ctx.now().plus_days(1);
        if next > self.horizon {
            return;
        }
        for tick in ticks_for(next) {
            ctx.schedule_at(next, tick_event(tick));
        }
    }
}

/// Handles to the registered processes of one market.
#[derive(Clone, Debug, Default)]
pub struct MarketIds {
    pub brokers: Vec<ProcessId>,
    pub network: Option<ProcessId>,
    pub repository: Option<ProcessId>,
    pub attritional: Option<ProcessId>,
    pub catastrophe: Option<ProcessId>,
    pub syndicates: Vec<ProcessId>,
    pub industry: Option<ProcessId>,
    pub metrics: Option<ProcessId>,
}

/// A ready-to-run market: the engine with every process registered and the
/// start events queued.
pub struct Market {
    pub engine: Engine<MarketEvent>,
    pub ids: MarketIds,
    pub config: ScenarioConfig,
    pub seed: u64,
}

impl Market {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Self, SimError> {
        let streams = RngStreams::new(seed);
        let mut engine = Engine::new();
        let mut ids = MarketIds::default();

        engine.add_process(Timekeeper::new(SimTime::from_day(cfg.horizon_days())));
        for b in 0..cfg.num_brokers {
            ids.brokers.push(engine.add_process(Broker::new(b, cfg, &streams)));
        }
        ids.network = Some(engine.add_process(Network::new(cfg, &streams)));
        ids.repository = Some(engine.add_process(RiskRepository::new(cfg)));
        if cfg.features.attritional {
            ids.attritional = Some(engine.add_process(AttritionalLossGenerator::new(cfg, &streams)));
        }
        if cfg.features.catastrophe {
            ids.catastrophe = Some(engine.add_process(CatastropheLossGenerator::new(cfg, &streams)));
        }
        for s in 0..cfg.num_syndicates {
            let mut subs = vec![
                engine.add_process(ActuarialPricer::new(s, cfg)),
                engine.add_process(Underwriter::new(s, cfg)),
            ];
            if cfg.features.premium_em {
                subs.push(engine.add_process(PremiumExposureManager::new(s, cfg)));
            }
            if cfg.features.var_em {
                subs.push(engine.add_process(VarExposureManager::new(s, cfg, &streams)));
            }
            let mut syndicate = Syndicate::new(s, cfg);
            syndicate.attach(subs);
            ids.syndicates.push(engine.add_process(syndicate));
        }
        ids.industry = Some(engine.add_process(IndustryStatistics::new(cfg)));
        ids.metrics = Some(engine.add_process(MetricsCollector::new(cfg)));

        engine.schedule(SimTime::ZERO, MarketEvent::SimulationStarted)?;
        for tick in ticks_for(SimTime::ZERO) {
            engine.schedule(SimTime::ZERO, tick_event(tick))?;
        }
        Ok(Market {
            engine,
            ids,
            config: cfg.clone(),
            seed,
        })
    }

    pub fn run(&mut self) -> Result<RunStats, SimError> {
        let end = SimTime::from_day(self.config.horizon_days());
        Ok(self.engine.run_until(end)?)
    }

    pub fn repository(&self) -> &RiskRepository {
        self.engine
            .process(self.ids.repository.expect("registered"))
            .expect("repository is never removed")
    }

    pub fn industry(&self) -> &IndustryStatistics {
        self.engine
            .process(self.ids.industry.expect("registered"))
            .expect("industry statistics are never removed")
    }

    pub fn metrics(&self) -> &MetricsCollector {
        self.engine
            .process(self.ids.metrics.expect("registered"))
            .expect("metrics are never removed")
    }

    pub fn syndicate(&self, id: usize) -> Option<&Syndicate> {
        self.engine.process(self.ids.syndicates[id])
    }

    pub fn into_output(mut self, stats: RunStats) -> RunOutput {
        let trace = self.engine.take_trace();
        let mut frames = self.metrics().frames.clone();
        frames.sort_by_key(|f| (f.year, f.syndicate_id));
        let initial = self.config.initial_capital;
        let final_snapshots = (0..self.config.num_syndicates)
            .map(|s| {
                let snapshot = self.metrics().last_snapshot[s].clone();
                FinalAccount::from_snapshot(s, initial, snapshot.as_ref())
            })
            .collect();
        let repo = self.repository();
        RunOutput {
            seed: self.seed,
            frames,
            industry: self.industry().history.clone(),
            catastrophes: repo.catastrophes.clone(),
            policies: repo.policy_log.clone(),
            accounts: final_snapshots,
            risks: repo.risks_seen,
            stats,
            trace,
        }
    }
}

/// Capital account of one syndicate at the end of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinalAccount {
    pub syndicate_id: usize,
    pub capital_start: f64,
    pub capital_end: f64,
    pub premiums: f64,
    pub claims: f64,
    pub dividends: f64,
    pub insolvent: bool,
}

impl FinalAccount {
    fn from_snapshot(syndicate_id: usize, initial: f64, s: Option<&SyndicateSnapshot>) -> Self {
        match s {
            Some(s) => FinalAccount {
                syndicate_id,
                capital_start: initial,
                capital_end: s.capital,
                premiums: s.premiums_total,
                claims: s.claims_total,
                dividends: s.dividends_total,
                insolvent: s.insolvent,
            },
            None => FinalAccount {
                syndicate_id,
                capital_start: initial,
                capital_end: initial,
                premiums: 0.0,
                claims: 0.0,
                dividends: 0.0,
                insolvent: false,
            },
        }
    }
}

/// Everything one replication produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub seed: u64,
    pub frames: Vec<YearFrame>,
    pub industry: Vec<IndustryYear>,
    pub catastrophes: Vec<CatastropheRecord>,
    pub policies: Vec<Policy>,
    pub accounts: Vec<FinalAccount>,
    pub risks: u64,
    pub stats: RunStats,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Runs one replication of `cfg` with `seed`.
pub fn run(cfg: &ScenarioConfig, seed: u64, trace: bool) -> Result<RunOutput, SimError> {
    let mut market = Market::new(cfg, seed)?;
    if trace {
        market.engine.enable_trace();
    }
    let stats = market.run()?;
    Ok(market.into_output(stats))
}
