use std::fmt::Write as _;

use crate::community::{detect_communities, CommunityParams};
use crate::decayed_graph::{aggregate_matrix, DecayParams};
use crate::trace::ContactTrace;

use super::events::epoch_times;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineRow {
    /// 1-based epoch number.
    pub epoch: usize,
    pub time: f64,
    pub k: usize,
    pub noise_pct: f64,
    pub bridging_pct: f64,
    pub strong_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineSummary {
    pub max: usize,
    pub min: usize,
    pub mean: f64,
    /// Sample variance of `k`.
    pub variance: f64,
}

/// Communities of the global decayed graph at every epoch boundary. Epochs
/// without usable structure report `k = 1` and every node as noise.
pub fn community_timeline(trace: &ContactTrace, decay: DecayParams, params: &CommunityParams, epoch: f64) -> Vec<TimelineRow> {
    epoch_times(trace.duration(), epoch)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let w = aggregate_matrix(trace, t, decay.beta);
            let (k, s) = match detect_communities(&w, params) {
                Ok(a) => (a.k(), a.assignment.stats()),
                Err(_) => (1, crate::community::CommunityAssignment::all_noise(trace.n(), params.phi).stats()),
            };
            TimelineRow { epoch: i + 1, time: t, k, noise_pct: s.noise_pct, bridging_pct: s.bridging_pct, strong_pct: s.strong_pct }
        })
        .collect()
}

/// Max, min, mean and variance of `k`, ignoring the first `warm_up` epochs.
pub fn summarize_timeline(rows: &[TimelineRow], warm_up: usize) -> Option<TimelineSummary> {
    let ks: Vec<f64> = rows.iter().skip(warm_up).map(|r| r.k as f64).collect();
    let s = super::metrics::summarize(&ks)?;
    let kept = rows.iter().skip(warm_up);
    Some(TimelineSummary {
        max: kept.clone().map(|r| r.k).max()?,
        min: kept.map(|r| r.k).min()?,
        mean: s.mean,
        variance: s.sd * s.sd,
    })
}

pub fn timeline_csv(rows: &[TimelineRow]) -> String {
    let mut out = String::from("epoch,k,noise_pct,bridging_pct,strong_pct\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.epoch, r.k, r.noise_pct, r.bridging_pct, r.strong_pct);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{generate_planted_trace, PlantedTraceSpec};

    #[test]
    fn empty_trace_is_all_noise() {
        let trace = ContactTrace::from_events(6, 100.0, Vec::new());
        let rows = community_timeline(&trace, DecayParams::default(), &CommunityParams::default(), 25.0);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.noise_pct == 100.0));
    }

    #[test]
    fn planted_trace_is_stable_after_warm_up() {
        let trace = generate_planted_trace(&PlantedTraceSpec::default()).unwrap().trace;
        let rows = community_timeline(&trace, DecayParams::default(), &CommunityParams::default(), trace.duration() / 24.0);
        let s = summarize_timeline(&rows, 2).unwrap();
        assert_eq!((s.max, s.min, s.variance), (3, 3, 0.0), "{rows:?}");
    }

    #[test]
    fn summary_statistics() {
        let row = |k| TimelineRow { epoch: 1, time: 0.0, k, noise_pct: 0.0, bridging_pct: 0.0, strong_pct: 100.0 };
        let s = summarize_timeline(&[row(9), row(3), row(5), row(4)], 1).unwrap();
        assert_eq!((s.max, s.min, s.mean, s.variance), (5, 3, 4.0, 1.0));
    }
}
