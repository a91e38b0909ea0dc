use std::sync::Arc;

use crate::community::{detect_communities, CommunityAssignment, CommunityParams};
use crate::decayed_graph::aggregate_matrix;
use crate::trace::{ContactTrace, NodeId};

use super::{Action, Encounter, Message, Protocol, Router};

/// Offline centrality ranks and communities.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleRanks {
    /// Relay count over all flooded source/destination pairs.
    pub global: Vec<u64>,
    /// `local[c][u]`: relay count over pairs inside community `c`, for members
    /// of `c`; zero otherwise.
    pub local: Vec<Vec<u64>>,
    pub communities: CommunityAssignment,
}

impl BubbleRanks {
    fn local_rank(&self, u: NodeId, dest_labels: &[usize]) -> u64 {
        dest_labels
            .iter()
            .filter(|c| self.communities.com[u].contains(c))
            .map(|&c| self.local[c][u])
            .max()
            .unwrap_or(0)
    }
}

/// Foremost-path tree from `src` starting at `t0`, following contacts in
/// trace order with hand-over at contact start.
fn foremost_parents(trace: &ContactTrace, src: NodeId, t0: f64) -> Vec<Option<NodeId>> {
    let n = trace.n();
    let mut reached = vec![false; n];
    let mut parent = vec![None; n];
    reached[src] = true;
    for e in trace.events().iter().filter(|e| e.on >= t0) {
        let (a, b) = (e.node_a, e.node_b);
        if reached[a] && !reached[b] {
            reached[b] = true;
            parent[b] = Some(a);
        } else if reached[b] && !reached[a] {
            reached[a] = true;
            parent[a] = Some(b);
        }
    }
    parent
}

/// Floods from every node at `starts` evenly spaced start times and counts how
/// often each node relays on a foremost path. `count_pair(src, dst)` selects
/// which pairs contribute.
pub fn flood_relay_counts(trace: &ContactTrace, starts: usize, count_pair: impl Fn(NodeId, NodeId) -> bool) -> Vec<u64> {
    let n = trace.n();
    let mut counts = vec![0u64; n];
    for j in 0..starts.max(1) {
        let t0 = trace.duration() * j as f64 / starts.max(1) as f64;
        for src in 0..n {
            let parent = foremost_parents(trace, src, t0);
            for dst in (0..n).filter(|&d| d != src && count_pair(src, d)) {
                let mut hop = parent[dst];
                while let Some(x) = hop {
                    if x == src {
                        break;
                    }
                    counts[x] += 1;
                    hop = parent[x];
                }
            }
        }
    }
    counts
}

/// Global and per-community relay ranks plus communities detected on the
/// undecayed full-trace graph.
pub fn bubble_precompute(trace: &ContactTrace, params: &CommunityParams, starts: usize) -> BubbleRanks {
    let n = trace.n();
    let w = aggregate_matrix(trace, trace.duration(), 0.0);
    let communities = if n >= 2 {
        detect_communities(&w, params).map(|a| a.assignment).unwrap_or_else(|_| CommunityAssignment::all_noise(n, params.phi))
    } else {
        CommunityAssignment::all_noise(n, params.phi)
    };
    let global = flood_relay_counts(trace, starts, |_, _| true);
    let local = (0..communities.centroids.len())
        .map(|c| {
            let inside = |u: NodeId| communities.com[u].contains(&c);
            let counts = flood_relay_counts(trace, starts, |s, d| inside(s) && inside(d));
            (0..n).map(|u| if inside(u) { counts[u] } else { 0 }).collect()
        })
        .collect();
    BubbleRanks { global, local, communities }
}

/// Climbs global rank until the message reaches the destination's community,
/// then climbs local rank inside it.
#[derive(Debug, Clone)]
pub struct BubbleRouter {
    ranks: Arc<BubbleRanks>,
}

impl BubbleRouter {
    pub fn new(ranks: Arc<BubbleRanks>) -> Self {
        BubbleRouter { ranks }
    }
}

impl Router for BubbleRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Bubble
    }

    fn decide(&self, enc: &Encounter<'_>, m: &Message, peer_has: bool) -> Action {
        if peer_has {
            return Action::Keep;
        }
        let r = &*self.ranks;
        let (u, v) = (enc.carrier.id, enc.peer.id);
        let dest: Vec<usize> = r.communities.com[m.dst].iter().copied().collect();
        let inside = |x: NodeId| dest.iter().any(|c| r.communities.com[x].contains(c));
        let copy = if inside(u) {
            inside(v) && r.local_rank(v, &dest) > r.local_rank(u, &dest)
        } else {
            inside(v) || r.global[v] > r.global[u]
        };
        if copy {
            Action::Copy
        } else {
            Action::Keep
        }
    }
}
