use std::collections::BTreeMap;

use super::{ContactEvent, ContactTrace, NodeId, TraceError};

/// A single GPS-style fix of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample {
    pub node: NodeId,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Parses `node,t,x,y` lines (meters, seconds). `#` starts a comment line.
pub fn parse_positions(text: &str) -> Result<Vec<PositionSample>, TraceError> {
    let mut out = Vec::new();
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
        let node = fields[0]
            .parse::<NodeId>()
            .map_err(|_| TraceError::Parse { line, reason: format!("invalid node id {:?}", fields[0]) })?;
        let mut nums = [0.0; 3];
        for (slot, s) in nums.iter_mut().zip(&fields[1..]) {
            *slot = match s.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(TraceError::Parse { line, reason: format!("invalid number {s:?}") }),
            };
        }
        out.push(PositionSample { node, t: nums[0], x: nums[1], y: nums[2] });
    }
    Ok(out)
}

struct Track {
    samples: Vec<PositionSample>,
    cursor: usize,
}

impl Track {
    /// Linear interpolation at `t`; `None` outside the sampled span. Calls
    /// must come with non-decreasing `t`.
    fn position_at(&mut self, t: f64) -> Option<(f64, f64)> {
        let s = &self.samples;
        if t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        while self.cursor + 1 < s.len() && s[self.cursor + 1].t <= t {
            self.cursor += 1;
        }
        let a = s[self.cursor];
        if a.t == t || self.cursor + 1 == s.len() {
            return Some((a.x, a.y));
        }
        let b = s[self.cursor + 1];
        let f = (t - a.t) / (b.t - a.t);
        Some((a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)))
    }
}

/// Derives contact intervals from node positions under a fixed-disk radio
/// model.
///
/// The time grid is the union of every node's sample instants. At each grid
/// instant positions are linearly interpolated and a pair is in contact when
/// both nodes are inside their sampled span and at most `range` meters apart.
/// Maximal runs of in-contact instants become events `[first, last]`; a run
/// of a single instant has zero duration and is dropped. Times are shifted so
/// the first sample is at 0.
pub fn extract_contacts(samples: &[PositionSample], range: f64) -> Result<ContactTrace, TraceError> {
    if !(range > 0.0) {
        return Err(TraceError::InvalidRange(range));
    }
    let mut by_node: BTreeMap<NodeId, Vec<PositionSample>> = BTreeMap::new();
    for s in samples {
        by_node.entry(s.node).or_default().push(*s);
    }
    let n = by_node.keys().next_back().map_or(0, |m| m + 1);
    if by_node.len() < 2 {
        return Ok(ContactTrace::empty(n));
    }
    for (node, track) in &by_node {
        if track.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(TraceError::Parse {
                line: 0,
                reason: format!("samples of node {node} are not strictly increasing in time"),
            });
        }
    }

    let mut grid: Vec<f64> = samples.iter().map(|s| s.t).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let t0 = grid[0];

    let ids: Vec<NodeId> = by_node.keys().copied().collect();
    let mut tracks: Vec<Track> =
        by_node.into_values().map(|samples| Track { samples, cursor: 0 }).collect();
    let m = ids.len();
    // open run per pair: (first, last) instant in contact
    let mut runs: Vec<Option<(f64, f64)>> = vec![None; m * m];
    let mut events = Vec::new();
    let range_sq = range * range;

    let close = |i: usize, j: usize, run: (f64, f64), events: &mut Vec<ContactEvent>| {
        if run.1 > run.0 {
            events.push(ContactEvent { node_a: ids[i], node_b: ids[j], on: run.0 - t0, off: run.1 - t0 });
        }
    };

    let mut pos = vec![None; m];
    for &t in &grid {
        for (p, track) in pos.iter_mut().zip(tracks.iter_mut()) {
            *p = track.position_at(t);
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let near = match (pos[i], pos[j]) {
                    (Some((xa, ya)), Some((xb, yb))) => {
                        let (dx, dy) = (xa - xb, ya - yb);
                        dx * dx + dy * dy <= range_sq
                    }
                    _ => false,
                };
                let slot = &mut runs[i * m + j];
                match (near, *slot) {
                    (true, Some((first, _))) => *slot = Some((first, t)),
                    (true, None) => *slot = Some((t, t)),
                    (false, Some(run)) => {
                        close(i, j, run, &mut events);
                        *slot = None;
                    }
                    (false, None) => {}
                }
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if let Some(run) = runs[i * m + j] {
                close(i, j, run, &mut events);
            }
        }
    }
    let duration = grid[grid.len() - 1] - t0;
    Ok(ContactTrace::from_events(n, duration, events))
}
