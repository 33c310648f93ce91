//! Single-threaded event loop with kind-based subscriptions.

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use super::queue::{EventKey, EventQueue};
use super::time::SimTime;
use crate::error::DesError;

/// Payload type driven through the engine.
pub trait SimEvent: Clone + fmt::Debug + 'static {
    type Kind: Copy + Eq + Hash + fmt::Debug;

    fn kind(&self) -> Self::Kind;

    /// Same-day priority tier. Lower tiers dispatch first.
    fn tier(&self) -> u8;

    /// One-line payload description used by the trace export.
    fn summary(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessId(pub usize);

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A simulation participant. Every event whose kind is listed in
/// [`Process::subscriptions`] is delivered to the process exactly once while it
/// is live.
pub trait Process<E: SimEvent>: Any {
    fn subscriptions(&self) -> Vec<E::Kind>;

    fn handle(&mut self, event: &E, ctx: &mut Context<'_, E>);
}

/// Handle given to a process while it reacts to an event.
pub struct Context<'a, E: SimEvent> {
    now: SimTime,
    me: ProcessId,
    outbox: &'a mut Vec<(SimTime, E)>,
    removals: &'a mut Vec<ProcessId>,
}

impl<E: SimEvent> Context<'_, E> {
    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn me(&self) -> ProcessId {
        self.me
    }

    /// Emits `event` on the current day.
    pub fn emit(&mut self, event: E) {
        self.outbox.push((self.now, event));
    }

    pub fn schedule_at(&mut self, at: SimTime, event: E) {
        self.outbox.push((at, event));
    }

    pub fn schedule_in(&mut self, days: u32, event: E) {
        self.outbox.push((self.now.plus_days(days), event));
    }

    /// Removes a process from the simulation once the current handler
    /// returns. Removed processes receive no further events.
    pub fn remove(&mut self, id: ProcessId) {
        self.removals.push(id);
    }
}

/// One dispatched event in the ordered trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub day: u32,
    pub seq: u64,
    pub kind: String,
    pub summary: String,
}

impl TraceRecord {
    /// `day,seq,kind,payload-summary`
    pub fn to_line(&self) -> String {
        format!("{},{},{},{}", self.day, self.seq, self.kind, self.summary)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub dispatched: u64,
    pub deliveries: u64,
}

struct Slot<E: SimEvent> {
    process: Box<dyn Process<E>>,
    live: bool,
}

pub struct Engine<E: SimEvent> {
    clock: SimTime,
    queue: EventQueue<E>,
    slots: Vec<Slot<E>>,
    subscribers: HashMap<E::Kind, Vec<ProcessId>>,
    trace: Option<Vec<TraceRecord>>,
    stats: RunStats,
    outbox: Vec<(SimTime, E)>,
    removals: Vec<ProcessId>,
}

impl<E: SimEvent> Default for Engine<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: SimEvent> Engine<E> {
    pub fn new() -> Self {
        Engine {
            clock: SimTime::ZERO,
            queue: EventQueue::new(),
            slots: Vec::new(),
            subscribers: HashMap::new(),
            trace: None,
            stats: RunStats::default(),
            outbox: Vec::new(),
            removals: Vec::new(),
        }
    }

    /// Records every dispatched event from now on.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> Option<&[TraceRecord]> {
        self.trace.as_deref()
    }

    pub fn take_trace(&mut self) -> Option<Vec<TraceRecord>> {
        self.trace.take()
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn add_process<P: Process<E>>(&mut self, process: P) -> ProcessId {
        let id = ProcessId(self.slots.len());
        for kind in process.subscriptions() {
            let subs = self.subscribers.entry(kind).or_default();
            if !subs.contains(&id) {
                subs.push(id);
            }
        }
        self.slots.push(Slot {
            process: Box::new(process),
            live: true,
        });
        id
    }

    pub fn remove_process(&mut self, id: ProcessId) {
        if let Some(slot) = self.slots.get_mut(id.0) {
            slot.live = false;
        }
    }

    pub fn is_live(&self, id: ProcessId) -> bool {
        self.slots.get(id.0).is_some_and(|s| s.live)
    }

    /// Borrows a registered process as its concrete type.
    pub fn process<T: Process<E>>(&self, id: ProcessId) -> Option<&T> {
        let any: &dyn Any = self.slots.get(id.0)?.process.as_ref();
        any.downcast_ref::<T>()
    }

    pub fn process_mut<T: Process<E>>(&mut self, id: ProcessId) -> Option<&mut T> {
        let any: &mut dyn Any = self.slots.get_mut(id.0)?.process.as_mut();
        any.downcast_mut::<T>()
    }

    /// Queues an event. Scheduling before the current clock is a model bug
    /// and is rejected.
    pub fn schedule(&mut self, at: SimTime, event: E) -> Result<EventKey, DesError> {
        if at < self.clock {
            return Err(DesError::ScheduledInPast {
                now: self.clock.day(),
                at: at.day(),
                kind: format!("{:?}", event.kind()),
            });
        }
        let tier = event.tier();
        Ok(self.queue.push(at, tier, event))
    }

    /// Dispatches the next pending event if it fires no later than `end`.
    /// Returns `Ok(false)` once nothing remains within the horizon.
    pub fn step(&mut self, end: SimTime) -> Result<bool, DesError> {
        match self.queue.peek_key() {
            Some(key) if key.fire_at <= end => {}
            _ => return Ok(false),
        }
        let (key, event) = self.queue.pop().expect("peeked entry");
        self.clock = key.fire_at;
        self.stats.dispatched += 1;
        let kind = event.kind();
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRecord {
                day: key.fire_at.day(),
                seq: key.seq,
                kind: format!("{kind:?}"),
                summary: event.summary(),
            });
        }

        let n_subs = self.subscribers.get(&kind).map_or(0, Vec::len);
        for i in 0..n_subs {
            let id = self.subscribers[&kind][i];
            let slot = &mut self.slots[id.0];
            if !slot.live {
                continue;
            }
            let mut ctx = Context {
                now: self.clock,
                me: id,
                outbox: &mut self.outbox,
                removals: &mut self.removals,
            };
            slot.process.handle(&event, &mut ctx);
            self.stats.deliveries += 1;
            for removed in self.removals.drain(..) {
                if let Some(s) = self.slots.get_mut(removed.0) {
                    s.live = false;
                }
            }
            let pending = std::mem::take(&mut self.outbox);
            for (at, ev) in pending {
                self.schedule(at, ev)?;
            }
        }
        Ok(true)
    }

    /// Runs until the queue holds nothing at or before `end`.
    pub fn run_until(&mut self, end: SimTime) -> Result<RunStats, DesError> {
        while self.step(end)? {}
        Ok(self.stats)
    }
}
