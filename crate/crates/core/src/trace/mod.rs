//! Contact traces: ingestion, position-based contact extraction and
//! synthetic traces with planted community structure.
//!
//! A [`ContactTrace`] is the ground truth every simulation replays. Events are
//! kept sorted by start time, node pairs are stored with `node_a < node_b`, and
//! the intervals of any single pair never overlap.

mod planted;
mod positions;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use planted::{generate_planted_trace, NodeRole, PlantedTrace, PlantedTraceSpec};
pub use positions::{extract_contacts, parse_positions, PositionSample};

/// Dense node identifier in `[0, n)`.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: contact start {on} is not before end {off}")]
    EmptyInterval { line: usize, on: f64, off: f64 },
    #[error("line {line}: node {node} cannot contact itself")]
    SelfContact { line: usize, node: NodeId },
    #[error("invalid planted trace spec: {0}")]
    InvalidSpec(String),
    #[error("invalid contact range {0}, must be positive")]
    InvalidRange(f64),
}

/// One contact interval between two distinct nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    pub node_a: NodeId,
    pub node_b: NodeId,
    pub on: f64,
    pub off: f64,
}

impl ContactEvent {
    pub fn duration(&self) -> f64 {
        self.off - self.on
    }

    /// Returns the other endpoint, or `None` if `node` is not part of the contact.
    pub fn peer_of(&self, node: NodeId) -> Option<NodeId> {
        if node == self.node_a {
            Some(self.node_b)
        } else if node == self.node_b {
            Some(self.node_a)
        } else {
            None
        }
    }
}

/// Immutable, normalized set of contacts.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactTrace {
    n: usize,
    events: Vec<ContactEvent>,
    duration: f64,
}

impl ContactTrace {
    /// Builds a trace from raw intervals. Pairs are canonicalized, overlapping
    /// or touching intervals of the same pair are unioned and the result is
    /// sorted by `(on, node_a, node_b)`.
    ///
    /// `n` is raised to cover every id present; `duration` is raised to cover
    /// the latest `off`.
    pub fn from_events(n: usize, duration: f64, events: Vec<ContactEvent>) -> Self {
        let mut per_pair: BTreeMap<(NodeId, NodeId), Vec<(f64, f64)>> = BTreeMap::new();
        let mut n = n;
        for ev in events {
            let (a, b) = if ev.node_a < ev.node_b {
                (ev.node_a, ev.node_b)
            } else {
                (ev.node_b, ev.node_a)
            };
            n = n.max(b + 1);
            per_pair.entry((a, b)).or_default().push((ev.on, ev.off));
        }

        let mut merged = Vec::new();
        for ((a, b), mut intervals) in per_pair {
            intervals.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
            let mut current: Option<(f64, f64)> = None;
            for (on, off) in intervals {
                current = match current {
                    Some((c_on, c_off)) if on <= c_off => Some((c_on, c_off.max(off))),
                    Some((c_on, c_off)) => {
                        merged.push(ContactEvent { node_a: a, node_b: b, on: c_on, off: c_off });
                        Some((on, off))
                    }
                    None => Some((on, off)),
                };
            }
            if let Some((on, off)) = current {
                merged.push(ContactEvent { node_a: a, node_b: b, on, off });
            }
        }
        merged.sort_by(|x, y| {
            x.on.total_cmp(&y.on)
                .then(x.node_a.cmp(&y.node_a))
                .then(x.node_b.cmp(&y.node_b))
        });

        let last_off = merged.iter().map(|e| e.off).fold(0.0_f64, f64::max);
        ContactTrace { n, events: merged, duration: duration.max(last_off) }
    }

    pub fn empty(n: usize) -> Self {
        ContactTrace { n, events: Vec::new(), duration: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Shifts every event so that the earliest contact starts at 0.
    pub fn normalized(&self) -> Self {
        let start = match self.events.first() {
            Some(e) => e.on,
            None => return self.clone(),
        };
        let events = self
            .events
            .iter()
            .map(|e| ContactEvent { on: e.on - start, off: e.off - start, ..*e })
            .collect();
        ContactTrace { n: self.n, events, duration: self.duration - start }
    }

    /// Writes the trace in the `node_a,node_b,on,off` line format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = writeln!(out, "{},{},{},{}", e.node_a, e.node_b, e.on, e.off);
        }
        out
    }
}

/// Parses the `node_a,node_b,on,off` contact format. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_contact_trace(text: &str) -> Result<ContactTrace, TraceError> {
    let mut events = Vec::new();
    let mut n = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(TraceError::Parse {
                line,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let node = |s: &str| {
            s.parse::<NodeId>()
                .map_err(|_| TraceError::Parse { line, reason: format!("invalid node id {s:?}") })
        };
        let time = |s: &str| match s.parse::<f64>() {
            Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
            _ => Err(TraceError::Parse { line, reason: format!("invalid time {s:?}") }),
        };
        let (a, b) = (node(fields[0])?, node(fields[1])?);
        let (on, off) = (time(fields[2])?, time(fields[3])?);
        if a == b {
            return Err(TraceError::SelfContact { line, node: a });
        }
        if on >= off {
            return Err(TraceError::EmptyInterval { line, on, off });
        }
        n = n.max(a.max(b) + 1);
        events.push(ContactEvent { node_a: a, node_b: b, on, off });
    }
    Ok(ContactTrace::from_events(n, 0.0, events))
}
