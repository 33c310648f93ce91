//! Pending-event queue ordered by `(fire_at, tier, seq)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::time::SimTime;

/// Total ordering key of a scheduled event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventKey {
    pub fire_at: SimTime,
    pub tier: u8,
    pub seq: u64,
}

struct Entry<T> {
    key: EventKey,
    item: T,
}

// BinaryHeap is a max-heap, so the comparison is reversed to pop the
// smallest key first.
impl<T> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key)
    }
}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl<T> Eq for Entry<T> {}

pub struct EventQueue<T> {
    heap: BinaryHeap<Entry<T>>,
    next_seq: u64,
}

impl<T> Default for EventQueue<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> EventQueue<T> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    /// Inserts `item` and returns its key. Sequence numbers strictly increase
    /// across the lifetime of the queue, which makes equal `(fire_at, tier)`
    /// pairs dequeue in insertion order.
    pub fn push(&mut self, fire_at: SimTime, tier: u8, item: T) -> EventKey {
        let key = EventKey {
            fire_at,
            tier,
            seq: self.next_seq,
        };
        self.next_seq += 1;
        self.heap.push(Entry { key, item });
        key
    }

    pub fn pop(&mut self) -> Option<(EventKey, T)> {
        self.heap.pop().map(|e| (e.key, e.item))
    }

    pub fn peek_key(&self) -> Option<EventKey> {
        self.heap.peek().map(|e| e.key)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
