//! The syndicate process: gathers quote components from its sub-processes,
//! offers quotes at the consolidation deadlines, books policies, pays claims
//! and dividends, and fails once capital turns negative.

pub mod dividend;
pub mod line_size;

use std::collections::BTreeMap;

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, ProcessId, SimTime, DAYS_PER_YEAR};
use crate::events::{
    EventKind, MarketEvent, Quote, QuoteComponent, RegionId, Risk, RiskId, Role, SyndicateId, SyndicateSnapshot,
};

pub use dividend::dividend;
pub use line_size::follow_line;

/// Components gathered for one request.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuoteComponents {
    pub actuarial: Option<f64>,
    pub markup: Option<f64>,
    pub premium_scaling: Option<Option<f64>>,
    pub var_allowed: Option<bool>,
}

impl QuoteComponents {
    pub fn record(&mut self, c: QuoteComponent) {
        match c {
            QuoteComponent::ActuarialPrice(p) => self.actuarial = Some(p),
            QuoteComponent::Markup(m) => self.markup = Some(m),
            QuoteComponent::PremiumScaling(s) => self.premium_scaling = Some(s),
            QuoteComponent::VarVerdict(v) => self.var_allowed = Some(v),
        }
    }

    /// Quoted price at 100% share, or `None` when a required component is
    /// missing or vetoes.
    pub fn price(&self, premium_em: bool, var_em: bool) -> Option<f64> {
        let base = self.actuarial? * self.markup?;
        let scale = if premium_em { self.premium_scaling?? } else { 1.0 };
        if var_em && !self.var_allowed? {
            return None;
        }
        Some(base * scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BookedShare {
    pub region: RegionId,
    pub limit: f64,
    pub line: f64,
    pub premium: f64,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndicateState {
    pub id: SyndicateId,
    pub capital: f64,
    pub initial_capital: f64,
    pub capital_at_year_start: f64,
    pub premiums_written_ytd: f64,
    pub claims_paid_ytd: f64,
    pub premiums_total: f64,
    pub claims_total: f64,
    pub dividends_total: f64,
    pub insolvent: bool,
    pub book: BTreeMap<RiskId, BookedShare>,
    pub region_exposure: Vec<f64>,
    pub region_policies: Vec<u32>,
    exposure_this_year: f64,
    exposure_next_year: f64,
}

impl SyndicateState {
    pub fn new(id: SyndicateId, cfg: &ScenarioConfig) -> Self {
        SyndicateState {
            id,
            capital: cfg.initial_capital,
            initial_capital: cfg.initial_capital,
            capital_at_year_start: cfg.initial_capital,
            premiums_written_ytd: 0.0,
            claims_paid_ytd: 0.0,
            premiums_total: 0.0,
            claims_total: 0.0,
            dividends_total: 0.0,
            insolvent: false,
            book: BTreeMap::new(),
            region_exposure: vec![0.0; cfg.num_peril_regions],
            region_policies: vec![0; cfg.num_peril_regions],
            exposure_this_year: 0.0,
            exposure_next_year: 0.0,
        }
    }

    /// Credits the full premium share and adds the policy's exposure. The
    /// cover from `today` to expiry is split across the calendar years it
    /// spans, counted per whole risk.
    pub fn book(&mut self, risk: &Risk, role: Role, price: f64, line: f64, today: SimTime) {
        let premium = price * line;
        self.capital += premium;
        self.premiums_written_ytd += premium;
        self.premiums_total += premium;
        self.region_exposure[risk.region] += risk.limit * line;
        self.region_policies[risk.region] += 1;
        let boundary = today.next_year_boundary().min(risk.expiry);
        let year = f64::from(DAYS_PER_YEAR);
        self.exposure_this_year += f64::from(boundary.day() - today.day()) / year;
        self.exposure_next_year += f64::from(risk.expiry.day().saturating_sub(boundary.day())) / year;
        self.book.insert(
            risk.id,
            BookedShare {
                region: risk.region,
                limit: risk.limit,
                line,
                premium,
                role,
            },
        );
    }

    pub fn expire(&mut self, risk_id: RiskId) -> bool {
        let Some(share) = self.book.remove(&risk_id) else {
            return false;
        };
        self.region_exposure[share.region] -= share.limit * share.line;
        self.region_policies[share.region] -= 1;
        if self.region_policies[share.region] == 0 {
            self.region_exposure[share.region] = 0.0;
        }
        true
    }

    /// Pays a claim. Returns true when this payment makes the syndicate
    /// insolvent.
    pub fn pay(&mut self, amount: f64) -> bool {
        self.capital -= amount;
        self.claims_paid_ytd += amount;
        self.claims_total += amount;
        if self.capital < 0.0 && !self.insolvent {
            self.insolvent = true;
            return true;
        }
        false
    }

    /// Pays the year's dividend and resets the yearly accumulators. Returns
    /// the policy-years of cover that fell in the closed year.
    pub fn close_year(&mut self, profit_fraction: f64) -> f64 {
        let d = dividend(self.capital - self.capital_at_year_start, profit_fraction);
        self.capital -= d;
        self.dividends_total += d;
        self.capital_at_year_start = self.capital;
        self.premiums_written_ytd = 0.0;
        self.claims_paid_ytd = 0.0;
        let closed = self.exposure_this_year;
        self.exposure_this_year = self.exposure_next_year;
        self.exposure_next_year = 0.0;
        closed
    }

    pub fn snapshot(&self, exposure_years: f64, closed_year: Option<u32>) -> SyndicateSnapshot {
        SyndicateSnapshot {
            capital: self.capital,
            premiums_written_ytd: self.premiums_written_ytd,
            premiums_total: self.premiums_total,
            claims_total: self.claims_total,
            dividends_total: self.dividends_total,
            region_exposure: self.region_exposure.clone(),
            region_policies: self.region_policies.clone(),
            exposure_years_ytd: exposure_years,
            closed_year,
            insolvent: self.insolvent,
        }
    }

    pub fn current_snapshot(&self) -> SyndicateSnapshot {
        self.snapshot(self.exposure_this_year, None)
    }
}

pub struct Syndicate {
    pub state: SyndicateState,
    premium_em: bool,
    var_em: bool,
    lead_line: f64,
    follow_line: f64,
    profit_fraction: f64,
    pending: BTreeMap<(RiskId, Role), QuoteComponents>,
    lead_prices: BTreeMap<RiskId, f64>,
    sub_processes: Vec<ProcessId>,
}

impl Syndicate {
    pub fn new(id: SyndicateId, cfg: &ScenarioConfig) -> Self {
        Syndicate {
            state: SyndicateState::new(id, cfg),
            premium_em: cfg.features.premium_em,
            var_em: cfg.features.var_em,
            lead_line: cfg.default_lead_line_size,
            follow_line: cfg.default_follow_line_size,
            profit_fraction: cfg.profit_fraction,
            pending: BTreeMap::new(),
            lead_prices: BTreeMap::new(),
            sub_processes: Vec::new(),
        }
    }

    pub fn id(&self) -> SyndicateId {
        self.state.id
    }

    /// Sub-processes removed together with this syndicate on failure.
    pub fn attach(&mut self, ids: impl IntoIterator<Item = ProcessId>) {
        self.sub_processes.extend(ids);
    }

    fn report(&self, ctx: &mut Context<'_, MarketEvent>) {
        ctx.emit(MarketEvent::SyndicateCapitalReported {
            syndicate_id: self.id(),
            snapshot: self.state.current_snapshot(),
        });
    }

    fn request(&mut self, risk: &Risk, role: Role, ctx: &mut Context<'_, MarketEvent>) {
        self.pending.insert((risk.id, role), QuoteComponents::default());
        ctx.emit(MarketEvent::QuoteRequested {
            syndicate_id: self.id(),
            risk: risk.clone(),
            role,
        });
    }

    fn consolidate_lead(&mut self, risk_id: RiskId, ctx: &mut Context<'_, MarketEvent>) {
        let Some(p) = self.pending.remove(&(risk_id, Role::Lead)) else {
            return;
        };
        if let Some(price) = p.price(self.premium_em, self.var_em) {
            ctx.emit(MarketEvent::LeadQuoteOffered(Quote {
                risk_id,
                syndicate_id: self.id(),
                role: Role::Lead,
                price,
                line_size: self.lead_line,
            }));
        }
    }

    fn consolidate_follow(&mut self, risk_id: RiskId, ctx: &mut Context<'_, MarketEvent>) {
        let Some(p) = self.pending.remove(&(risk_id, Role::Follow)) else {
            return;
        };
        let Some(lead_price) = self.lead_prices.remove(&risk_id) else {
            return;
        };
        let Some(price) = p.price(self.premium_em, self.var_em) else {
            return;
        };
        if let Some(line) = follow_line(self.follow_line, price, lead_price) {
            ctx.emit(MarketEvent::FollowQuoteOffered(Quote {
                risk_id,
                syndicate_id: self.id(),
                role: Role::Follow,
                price,
                line_size: line,
            }));
        }
    }

    fn fail(&mut self, ctx: &mut Context<'_, MarketEvent>) {
        ctx.emit(MarketEvent::SyndicateBankrupted { syndicate_id: self.id() });
        self.pending.clear();
        self.lead_prices.clear();
        for id in self.sub_processes.drain(..) {
            ctx.remove(id);
        }
        ctx.remove(ctx.me());
    }
}

impl Process<MarketEvent> for Syndicate {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![
            EventKind::Month,
            EventKind::Year,
            EventKind::LeadQuoteRequested,
            EventKind::FollowQuoteRequested,
            EventKind::QuoteComponentComputed,
            EventKind::LeadQuoteConsolidationDeadlineReached,
            EventKind::FollowQuoteConsolidationDeadlineReached,
            EventKind::LeadQuoteAccepted,
            EventKind::FollowQuoteAccepted,
            EventKind::PolicyExpired,
            EventKind::ClaimReceived,
        ]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        if self.state.insolvent {
            return;
        }
        let me = self.id();
        match event {
            MarketEvent::Month => self.report(ctx),
            MarketEvent::Year => {
                let exposure_years = self.state.close_year(self.profit_fraction);
                let year = ctx.now().year();
                ctx.emit(MarketEvent::SyndicateCapitalReported {
                    syndicate_id: me,
                    snapshot: self.state.snapshot(exposure_years, Some(year)),
                });
            }
            MarketEvent::LeadQuoteRequested { risk, syndicate_id } if *syndicate_id == me => {
                self.request(risk, Role::Lead, ctx);
            }
            MarketEvent::FollowQuoteRequested { risk, syndicate_id } if *syndicate_id == me => {
                self.request(risk, Role::Follow, ctx);
            }
            MarketEvent::QuoteComponentComputed { syndicate_id, risk_id, role, component } if *syndicate_id == me => {
                if let Some(p) = self.pending.get_mut(&(*risk_id, *role)) {
                    p.record(*component);
                }
            }
            MarketEvent::LeadQuoteConsolidationDeadlineReached { risk_id } => self.consolidate_lead(*risk_id, ctx),
            MarketEvent::FollowQuoteConsolidationDeadlineReached { risk_id } => {
                self.consolidate_follow(*risk_id, ctx)
            }
            MarketEvent::LeadQuoteAccepted { risk, syndicate_id, price, signed_line } => {
                if *syndicate_id == me {
                    self.state.book(risk, Role::Lead, *price, *signed_line, ctx.now());
                    self.report(ctx);
                } else if self.pending.contains_key(&(risk.id, Role::Follow)) {
                    self.lead_prices.insert(risk.id, *price);
                }
            }
            MarketEvent::FollowQuoteAccepted { risk, syndicate_id, price, signed_line } if *syndicate_id == me => {
                self.state.book(risk, Role::Follow, *price, *signed_line, ctx.now());
                self.report(ctx);
            }
            MarketEvent::PolicyExpired { risk_id, syndicates } if syndicates.contains(&me) => {
                if self.state.expire(*risk_id) {
                    self.report(ctx);
                }
            }
            MarketEvent::ClaimReceived(claim) if claim.syndicate_id == me => {
                if claim.amount == 0.0 {
                    return;
                }
                let failed = self.state.pay(claim.amount);
                self.report(ctx);
                if failed {
                    self.fail(ctx);
                }
            }
            _ => {}
        }
    }
}
