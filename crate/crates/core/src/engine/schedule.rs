use rayon::prelude::*;

use crate::community::CommunityParams;
use crate::decayed_graph::{exchange_views, DecayParams, DecayedGraphView};
use crate::routing::{recompute_social_state, NodeSocialState, TieStrength};
use crate::trace::{ContactTrace, NodeId};

use super::EngineError;

/// Every node's social state at each epoch boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialSchedule {
    pub times: Vec<f64>,
    /// `states[e][u]`: node `u`'s state computed at `times[e]`.
    pub states: Vec<Vec<NodeSocialState>>,
}

/// Replays gossip over the trace and recomputes every node's communities at
/// each epoch. At contact end both sides record the contact, then exchange
/// views. An epoch at the same instant as a contact end sees the views
/// before that contact.
pub fn social_schedule(
    trace: &ContactTrace,
    decay: DecayParams,
    params: &CommunityParams,
    epochs: &[f64],
) -> Result<SocialSchedule, EngineError> {
    let n = trace.n();
    let mut views: Vec<DecayedGraphView> =
        (0..n).map(|u| DecayedGraphView::new(u, n, decay)).collect::<Result<_, _>>()?;
    let mut ends: Vec<(f64, usize)> = trace.events().iter().enumerate().map(|(i, e)| (e.off, i)).collect();
    ends.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut states = Vec::with_capacity(epochs.len());
    let mut next = 0;
    for &t in epochs {
        while next < ends.len() && ends[next].0 < t {
            replay_end(trace, &mut views, ends[next].1)?;
            next += 1;
        }
        states.push(views.par_iter().map(|v| recompute_social_state(v, t, params)).collect());
    }
    Ok(SocialSchedule { times: epochs.to_vec(), states })
}

fn replay_end(trace: &ContactTrace, views: &mut [DecayedGraphView], index: usize) -> Result<(), EngineError> {
    let e = &trace.events()[index];
    let (a, b) = (e.node_a, e.node_b);
    views[a].record_contact(b, e.on, e.off)?;
    views[b].record_contact(a, e.on, e.off)?;
    let (lo, hi) = views.split_at_mut(b);
    exchange_views(&mut lo[a], &mut hi[0])?;
    Ok(())
}

/// Each node's own row of its graph view, served from per-pair contact
/// history. Gossip never overwrites a node's own row, so this matches the
/// replayed view exactly while skipping the replay.
#[derive(Debug, Clone)]
pub struct OwnTies {
    n: usize,
    beta: f64,
    /// Per unordered pair `(a < b)`: contact end times and the decayed weight
    /// right after each contact.
    history: Vec<Vec<(f64, f64)>>,
}

impl OwnTies {
    pub fn new(trace: &ContactTrace, beta: f64) -> Self {
        let n = trace.n();
        let mut history: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n * n];
        let mut ordered: Vec<_> = trace.events().to_vec();
        ordered.sort_by(|x, y| x.off.total_cmp(&y.off));
        for e in ordered {
            let h = &mut history[e.node_a * n + e.node_b];
            let prev = h.last().map_or(0.0, |&(t, w)| w * (-beta * (e.off - t)).exp());
            h.push((e.off, prev + (e.off - e.on)));
        }
        OwnTies { n, beta, history }
    }
}

impl TieStrength for OwnTies {
    /// Contacts that ended strictly before `now`; one ending exactly at `now`
    /// is recorded after the contact starts of that instant.
    fn tie_strength(&self, u: NodeId, v: NodeId, now: f64) -> f64 {
        if u == v {
            return 0.0;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let h = &self.history[a * self.n + b];
        let idx = h.partition_point(|&(t, _)| t < now);
        if idx == 0 {
            return 0.0;
        }
        let (t, w) = h[idx - 1];
        w * (-self.beta * (now - t)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decayed_graph::brute_force_weight;
    use crate::trace::{generate_planted_trace, PlantedTraceSpec};

    #[test]
    fn own_ties_match_brute_force() {
        let spec = PlantedTraceSpec { duration: 4.0 * 3600.0, ..PlantedTraceSpec::default() };
        let trace = generate_planted_trace(&spec).unwrap().trace;
        let beta = 1.0 / 3600.0;
        let ties = OwnTies::new(&trace, beta);
        for (u, v) in [(0, 1), (3, 7), (11, 12), (0, 20)] {
            for now in [600.0, 3600.0, 7300.5, 14_400.0] {
                let series: Vec<(f64, f64)> = trace
                    .events()
                    .iter()
                    .filter(|e| (e.node_a, e.node_b) == (u.min(v), u.max(v)) && e.off < now)
                    .map(|e| (e.on, e.off))
                    .collect();
                let expected = brute_force_weight(&series, now, beta);
                let got = ties.tie_strength(v, u, now);
                assert!((got - expected).abs() <= 1e-9 * expected.max(1.0), "{u}-{v}@{now}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn own_ties_match_replayed_views() {
        let spec = PlantedTraceSpec { duration: 3.0 * 3600.0, seed: 4, ..PlantedTraceSpec::default() };
        let trace = generate_planted_trace(&spec).unwrap().trace;
        let decay = DecayParams::default();
        let ties = OwnTies::new(&trace, decay.beta);
        let n = trace.n();
        let mut views: Vec<DecayedGraphView> = (0..n).map(|u| DecayedGraphView::new(u, n, decay).unwrap()).collect();
        let mut ends: Vec<(f64, usize)> = trace.events().iter().enumerate().map(|(i, e)| (e.off, i)).collect();
        ends.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let now = trace.duration() + 1.0;
        for &(_, i) in &ends {
            replay_end(&trace, &mut views, i).unwrap();
        }
        for u in 0..n {
            for d in 0..n {
                let a = views[u].tie_strength(u, d, now);
                let b = ties.tie_strength(u, d, now);
                assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{u},{d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn schedule_is_deterministic_and_sized() {
        let spec = PlantedTraceSpec { duration: 2.0 * 3600.0, ..PlantedTraceSpec::default() };
        let trace = generate_planted_trace(&spec).unwrap().trace;
        let p = CommunityParams::default();
        let a = social_schedule(&trace, DecayParams::default(), &p, &[3600.0, 7200.0]).unwrap();
        assert_eq!(a.states.len(), 2);
        assert!(a.states.iter().all(|s| s.len() == trace.n()));
        assert_eq!(a, social_schedule(&trace, DecayParams::default(), &p, &[3600.0, 7200.0]).unwrap());
    }
}
