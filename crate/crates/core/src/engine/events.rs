use std::cmp::Ordering;

use crate::routing::Message;
use crate::trace::ContactTrace;

/// Tie order at equal times follows declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    EpochBoundary,
    MessageCreate,
    ContactStart,
    ContactEnd,
    MessageExpiry,
}

/// `index` is the epoch number, message id or contact index, by kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub kind: EventKind,
    pub index: usize,
}

impl SimEvent {
    fn order(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.kind.cmp(&other.kind)).then(self.index.cmp(&other.index))
    }
}

impl Eq for SimEvent {}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order(other)
    }
}

/// Every event of a run, fully ordered. Messages expire at `created + ttl`,
/// after any contact starting at that same instant.
pub fn build_events(trace: &ContactTrace, workload: &[Message], epochs: &[f64]) -> Vec<SimEvent> {
    let mut events = Vec::with_capacity(2 * trace.events().len() + 2 * workload.len() + epochs.len());
    events.extend(epochs.iter().enumerate().map(|(i, &time)| SimEvent { time, kind: EventKind::EpochBoundary, index: i }));
    for (i, c) in trace.events().iter().enumerate() {
        events.push(SimEvent { time: c.on, kind: EventKind::ContactStart, index: i });
        events.push(SimEvent { time: c.off, kind: EventKind::ContactEnd, index: i });
    }
    for m in workload {
        events.push(SimEvent { time: m.created, kind: EventKind::MessageCreate, index: m.id });
        if m.ttl.is_finite() {
            events.push(SimEvent { time: m.created + m.ttl, kind: EventKind::MessageExpiry, index: m.id });
        }
    }
    events.sort();
    events
}

/// Epoch instants `k · epoch` for `k ≥ 1` up to the trace duration.
pub fn epoch_times(duration: f64, epoch: f64) -> Vec<f64> {
    if !(epoch > 0.0) || !duration.is_finite() {
        return Vec::new();
    }
    (1..).map(|k| k as f64 * epoch).take_while(|&t| t <= duration + 1e-9 * duration.abs()).collect()
}
