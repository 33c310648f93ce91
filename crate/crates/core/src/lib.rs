//! Deterministic discrete-event simulation of a syndicated specialty
//! insurance market.
//!
//! Brokers bring risks to market, syndicates price and underwrite them as
//! lead or follow insurers, and attritional and catastrophe losses flow back
//! as claims. A run is fully determined by its [`config::ScenarioConfig`] and
//! seed.
//!
//! ```no_run
//! use lloyds_sim::config::{Preset, ScenarioConfig};
//!
//! let cfg = ScenarioConfig::preset(Preset::Scenario1);
//! let run = lloyds_sim::market::run(&cfg, 0, false).unwrap();
//! println!("{} syndicate-years", run.frames.len());
//! ```

pub mod analysis;
pub mod broker;
pub mod config;
pub mod des;
pub mod error;
pub mod events;
pub mod exposure;
pub mod industry;
pub mod losses;
pub mod market;
pub mod metrics;
pub mod network;
pub mod output;
pub mod pricing;
pub mod repository;
pub mod syndicate;

pub use config::{Preset, ScenarioConfig};
pub use error::{ConfigError, SimError};
pub use market::{run, Market, RunOutput};
