//! Generic discrete-event machinery: clock, queue, processes, RNG streams.
//!
//! Events are dispatched in `(fire_at, tier, seq)` order. Within one event,
//! subscribers are called in registration order, and anything they schedule
//! enters the queue with a fresh sequence number, so a run is fully
//! determined by its inputs and seed.

mod engine;
mod queue;
pub mod replication;
mod rng;
pub mod time;

pub use engine::{Context, Engine, Process, ProcessId, RunStats, SimEvent, TraceRecord};
pub use queue::{EventKey, EventQueue};
pub use replication::run_replications;
pub use rng::{RngStreams, SimRng};
pub use time::{ticks_for, SimTime, Tick, DAYS_PER_MONTH, DAYS_PER_YEAR};
