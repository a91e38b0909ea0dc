use std::collections::BTreeSet;

use crate::community::{detect_communities, CommunityAssignment, CommunityParams};
use crate::decayed_graph::DecayedGraphView;
use crate::trace::NodeId;

/// A node's picture of the network at its latest epoch: communities and
/// partial centralities computed from its own graph view.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSocialState {
    pub node: NodeId,
    pub computed_at: f64,
    /// `false` when the view held no usable structure; every node then counts
    /// as noise.
    pub structured: bool,
    pub assignment: CommunityAssignment,
    /// `partial_centrality[u][i] = |α_ui| λ_i` for each dimension `i < k`.
    pub partial_centrality: Vec<Vec<f64>>,
}

impl NodeSocialState {
    pub fn unstructured(node: NodeId, n: usize, computed_at: f64, phi: f64) -> Self {
        NodeSocialState {
            node,
            computed_at,
            structured: false,
            assignment: CommunityAssignment::all_noise(n, phi),
            partial_centrality: vec![Vec::new(); n],
        }
    }

    pub fn is_noise(&self, u: NodeId) -> bool {
        !self.structured || self.assignment.is_noise(u)
    }

    pub fn self_is_noise(&self) -> bool {
        self.is_noise(self.node)
    }

    pub fn labels(&self, u: NodeId) -> &BTreeSet<usize> {
        &self.assignment.com[u]
    }

    /// Whether `u` and `d` have a community in common in this view.
    pub fn shares_community(&self, u: NodeId, d: NodeId) -> bool {
        !self.is_noise(u) && !self.labels(u).is_disjoint(self.labels(d))
    }

    /// `Σ_{i ∈ labels} |α_ui| λ_i`; labels beyond `k` contribute nothing.
    pub fn partial_centrality_over<'a>(&self, u: NodeId, labels: impl IntoIterator<Item = &'a usize>) -> f64 {
        let row = &self.partial_centrality[u];
        labels.into_iter().filter_map(|&i| row.get(i)).sum()
    }
}

/// Runs community detection on the node's own snapshot at `now`.
pub fn recompute_social_state(view: &DecayedGraphView, now: f64, params: &CommunityParams) -> NodeSocialState {
    let node = view.owner();
    let n = view.n();
    let Ok(w) = view.snapshot_matrix(now) else {
        return NodeSocialState::unstructured(node, n, now, params.phi);
    };
    let Ok(analysis) = detect_communities(&w, params) else {
        return NodeSocialState::unstructured(node, n, now, params.phi);
    };
    let k = analysis.subspace.k;
    let lambda = &analysis.subspace.eigenvalues;
    let partial_centrality =
        (0..n).map(|u| (0..k).map(|i| analysis.coords.row(u)[i].abs() * lambda[i]).collect()).collect();
    let structured = analysis.assignment.centroids.len() == k;
    NodeSocialState { node, computed_at: now, structured, assignment: analysis.assignment, partial_centrality }
}

/// Greedy maximum-overlap matching of community labels between two views.
/// Entry `a` of the result is the label in `to` matched with label `a` of
/// `from`, if any. Ties go to the lowest `(a, b)` pair.
pub fn match_labels(from: &CommunityAssignment, to: &CommunityAssignment) -> Vec<Option<usize>> {
    let ka = from.centroids.len();
    let kb = to.centroids.len();
    let members_a: Vec<BTreeSet<NodeId>> = (0..ka).map(|a| from.members(a).into_iter().collect()).collect();
    let members_b: Vec<BTreeSet<NodeId>> = (0..kb).map(|b| to.members(b).into_iter().collect()).collect();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (a, ma) in members_a.iter().enumerate() {
        for (b, mb) in members_b.iter().enumerate() {
            let overlap = ma.intersection(mb).count();
            if overlap > 0 {
                pairs.push((overlap, a, b));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut result = vec![None; ka];
    let mut used = vec![false; kb];
    for (_, a, b) in pairs {
        if result[a].is_none() && !used[b] {
            result[a] = Some(b);
            used[b] = true;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::{Category, Centroid};
    use crate::decayed_graph::{exchange_views, DecayParams};
    use crate::trace::{generate_planted_trace, NodeRole, PlantedTraceSpec};

    fn assignment(labels: &[&[usize]], k: usize) -> CommunityAssignment {
        let mut a = CommunityAssignment::all_noise(labels.len(), 0.1);
        a.k = k;
        a.centroids = (0..k).map(|i| Centroid::seeded(i, &[1.0])).collect();
        for (u, l) in labels.iter().enumerate() {
            a.com[u] = l.iter().copied().collect();
            a.category[u] = match l.len() {
                0 => Category::Noise,
                1 => Category::Strong,
                _ => Category::Bridging,
            };
        }
        a
    }

    #[test]
    fn matching_follows_member_overlap() {
        let a = assignment(&[&[0], &[0], &[1], &[1], &[]], 2);
        let b = assignment(&[&[1], &[1], &[0], &[], &[0]], 2);
        assert_eq!(match_labels(&a, &b), vec![Some(1), Some(0)]);
        let c = assignment(&[&[0], &[0], &[0], &[0], &[]], 1);
        assert_eq!(match_labels(&a, &c), vec![Some(0), None]);
    }

    #[test]
    fn fresh_view_is_all_noise() {
        let view = DecayedGraphView::new(0, 5, DecayParams::default()).unwrap();
        let s = recompute_social_state(&view, 100.0, &CommunityParams::default());
        assert!((0..5).all(|u| s.is_noise(u)));
        assert!(!s.shares_community(0, 1));
    }

    #[test]
    fn identical_views_give_identical_state() {
        let planted = generate_planted_trace(&PlantedTraceSpec::default()).unwrap();
        let mut view = DecayedGraphView::new(0, planted.trace.n(), DecayParams::default()).unwrap();
        for e in planted.trace.events().iter().filter(|e| e.node_a == 0 || e.node_b == 0) {
            let peer = e.peer_of(0).unwrap();
            view.record_contact(peer, e.on, e.off).unwrap();
        }
        let t = planted.trace.duration();
        let p = CommunityParams::default();
        assert_eq!(recompute_social_state(&view, t, &p), recompute_social_state(&view, t, &p));
    }

    #[test]
    fn gossiped_view_recovers_own_planted_block() {
        let planted = generate_planted_trace(&PlantedTraceSpec::default()).unwrap();
        let trace = &planted.trace;
        let n = trace.n();
        let mut views: Vec<DecayedGraphView> =
            (0..n).map(|u| DecayedGraphView::new(u, n, DecayParams::default()).unwrap()).collect();
        let mut ends: Vec<_> = trace.events().to_vec();
        ends.sort_by(|x, y| x.off.total_cmp(&y.off));
        for e in &ends {
            let (a, b) = (e.node_a, e.node_b);
            views[a].record_contact(b, e.on, e.off).unwrap();
            views[b].record_contact(a, e.on, e.off).unwrap();
            let (lo, hi) = views.split_at_mut(b);
            exchange_views(&mut lo[a], &mut hi[0]).unwrap();
        }
        let t = trace.duration();
        let s = recompute_social_state(&views[0], t, &CommunityParams::default());
        let NodeRole::Strong { community } = planted.roles[0] else { panic!("node 0 is planted strong") };
        let own = s.labels(0).clone();
        assert_eq!(own.len(), 1);
        let mates: Vec<usize> =
            (0..n).filter(|&u| planted.roles[u] == NodeRole::Strong { community }).collect();
        for u in mates {
            assert_eq!(s.labels(u), &own, "node {u}");
        }
        assert!(s.partial_centrality_over(0, own.iter()) > 0.0);
    }
}
