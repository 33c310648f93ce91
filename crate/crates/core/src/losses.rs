//! Attritional and catastrophe loss generators.
//!
//! Attritional losses are drawn per risk when the risk is broadcast: a
//! Poisson number of claims over the one-year term, each with a gamma
//! severity. Catastrophes are drawn once for the whole horizon at simulation
//! start: a Poisson number of events, each striking one uniformly chosen peril
//! region with a damage fraction from a truncated Pareto law. The repository
//! turns a catastrophe into per-risk losses of `damage_fraction * limit`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::config::ScenarioConfig;
use crate::des::{Context, Process, RngStreams, SimRng, SimTime, DAYS_PER_YEAR};
use crate::events::{EventKind, LossId, MarketEvent, RegionId, Risk};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttritionalParams {
    pub yearly_claim_frequency: f64,
    pub cov: f64,
    pub mean_severity: f64,
}

impl AttritionalParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        AttritionalParams {
            yearly_claim_frequency: cfg.yearly_claim_frequency,
            cov: cfg.gamma_cov,
            mean_severity: cfg.gamma_mean,
        }
    }

    /// Gamma `(shape, scale)` with the configured mean and coefficient of
    /// variation: shape `1/cov²`, scale `mean·cov²`.
    pub fn gamma_shape_scale(&self) -> (f64, f64) {
        let cov2 = self.cov * self.cov;
        (1.0 / cov2, self.mean_severity * cov2)
    }

    pub fn severity(&self) -> Gamma<f64> {
        let (shape, scale) = self.gamma_shape_scale();
        Gamma::new(shape, scale).expect("validated gamma parameters")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatastropheParams {
    pub mean_events_per_year: f64,
    pub pareto_shape: f64,
    pub min_damage_fraction: f64,
    pub truncation_multiple: f64,
}

impl CatastropheParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        CatastropheParams {
            mean_events_per_year: cfg.mean_cat_events_per_year,
            pareto_shape: cfg.pareto_shape,
            min_damage_fraction: cfg.min_cat_damage_fraction,
            truncation_multiple: cfg.cat_truncation_multiple,
        }
    }

    pub fn max_damage_fraction(&self) -> f64 {
        self.min_damage_fraction * self.truncation_multiple
    }

    pub fn sample_damage<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_truncated_pareto(
            rng,
            self.pareto_shape,
            self.min_damage_fraction,
            self.max_damage_fraction(),
        )
    }
}

/// Poisson draw that accepts a zero rate.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let d = Poisson::new(lambda).expect("finite positive rate");
    d.sample(rng) as u64
}

/// Pareto with minimum `x_min` and shape `shape`, truncated to `[x_min, x_max]`,
/// sampled by inverting its CDF
/// `F(x) = (1 - (x_min/x)^a) / (1 - (x_min/x_max)^a)`.
pub fn sample_truncated_pareto<R: Rng + ?Sized>(rng: &mut R, shape: f64, x_min: f64, x_max: f64) -> f64 {
    let u: f64 = rng.random();
    let tail_mass = 1.0 - (x_min / x_max).powf(shape);
    let x = x_min / (1.0 - u * tail_mass).powf(1.0 / shape);
    x.clamp(x_min, x_max)
}

/// One pre-generated attritional loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttritionalDraw {
    pub day: SimTime,
    pub amount: f64,
}

/// Draws the attritional losses for one risk. Days fall uniformly in
/// `[inception, expiry)`.
pub fn generate_attritional<R: Rng + ?Sized>(params: &AttritionalParams, risk: &Risk, rng: &mut R) -> Vec<AttritionalDraw> {
    let n = sample_poisson(rng, params.yearly_claim_frequency);
    if n == 0 {
        return Vec::new();
    }
    let severity = params.severity();
    let term = risk.expiry.day() - risk.inception.day();
    (0..n)
        .map(|_| AttritionalDraw {
            day: risk.inception.plus_days(rng.random_range(0..term)),
            amount: severity.sample(rng),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatastropheDraw {
    pub day: SimTime,
    pub region: RegionId,
    pub damage_fraction: f64,
}

/// Draws every catastrophe of a run: `Poisson(rate · years)` events at
/// uniform days in the horizon and uniform regions.
pub fn generate_catastrophes<R: Rng + ?Sized>(
    params: &CatastropheParams,
    horizon_years: u32,
    num_regions: usize,
    rng: &mut R,
) -> Vec<CatastropheDraw> {
    let n = sample_poisson(rng, params.mean_events_per_year * f64::from(horizon_years));
    let horizon_days = horizon_years * DAYS_PER_YEAR;
    let mut draws: Vec<CatastropheDraw> = (0..n)
        .map(|_| CatastropheDraw {
            day: SimTime::from_day(rng.random_range(0..horizon_days)),
            region: rng.random_range(0..num_regions),
            damage_fraction: params.sample_damage(rng),
        })
        .collect();
    draws.sort_by_key(|d| d.day);
    draws
}

/// Splits a regional loss across risks in proportion to their limits, each
/// share capped at its limit. Returns the per-risk losses and the part of
/// `total_loss` nobody covers.
pub fn allocate_regional_loss(total_loss: f64, limits: &[f64]) -> (Vec<f64>, f64) {
    let exposed: f64 = limits.iter().sum();
    if limits.is_empty() || exposed <= 0.0 || total_loss <= 0.0 {
        return (vec![0.0; limits.len()], total_loss.max(0.0));
    }
    let shares: Vec<f64> = limits
        .iter()
        .map(|&l| (total_loss * l / exposed).min(l))
        .collect();
    let allocated: f64 = shares.iter().sum();
    (shares, (total_loss - allocated).max(0.0))
}

// Loss ids are unique across both generators.
fn attritional_loss_id(n: u64) -> LossId {
    n << 1
}

fn catastrophe_loss_id(n: u64) -> LossId {
    (n << 1) | 1
}

pub struct AttritionalLossGenerator {
    params: AttritionalParams,
    rng: SimRng,
    issued: u64,
}

impl AttritionalLossGenerator {
    pub fn new(cfg: &ScenarioConfig, streams: &RngStreams) -> Self {
        AttritionalLossGenerator {
            params: AttritionalParams::from_config(cfg),
            rng: streams.stream("attritional"),
            issued: 0,
        }
    }

    pub fn issued(&self) -> u64 {
        self.issued
    }
}

impl Process<MarketEvent> for AttritionalLossGenerator {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::RiskBroadcasted]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        let MarketEvent::RiskBroadcasted(risk) = event else {
            return;
        };
        for draw in generate_attritional(&self.params, risk, &mut self.rng) {
            let loss_id = attritional_loss_id(self.issued);
            self.issued += 1;
            ctx.schedule_at(
                draw.day,
                MarketEvent::AttritionalLossOccurred {
                    loss_id,
                    risk_id: risk.id,
                    amount: draw.amount,
                },
            );
        }
    }
}

pub struct CatastropheLossGenerator {
    params: CatastropheParams,
    horizon_years: u32,
    num_regions: usize,
    rng: SimRng,
    pub draws: Vec<CatastropheDraw>,
}

impl CatastropheLossGenerator {
    pub fn new(cfg: &ScenarioConfig, streams: &RngStreams) -> Self {
        CatastropheLossGenerator {
            params: CatastropheParams::from_config(cfg),
            horizon_years: cfg.horizon_years,
            num_regions: cfg.num_peril_regions,
            rng: streams.stream("catastrophe"),
            draws: Vec::new(),
        }
    }
}

impl Process<MarketEvent> for CatastropheLossGenerator {
    fn subscriptions(&self) -> Vec<EventKind> {
        vec![EventKind::SimulationStarted]
    }

    fn handle(&mut self, event: &MarketEvent, ctx: &mut Context<'_, MarketEvent>) {
        if !matches!(event, MarketEvent::SimulationStarted) {
            return;
        }
        self.draws = generate_catastrophes(&self.params, self.horizon_years, self.num_regions, &mut self.rng);
        for (i, draw) in self.draws.iter().enumerate() {
            ctx.schedule_at(
                draw.day,
                MarketEvent::CatastropheLossOccurred {
                    loss_id: catastrophe_loss_id(i as u64),
                    region: draw.region,
                    damage_fraction: draw.damage_fraction,
                },
            );
        }
    }
}
