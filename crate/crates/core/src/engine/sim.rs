use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::community::CommunityParams;
use crate::decayed_graph::DecayParams;
use crate::routing::{
    bubble_precompute, on_contact, BubbleRanks, BubbleRouter, DirectRouter, Encounter, EpidemicRouter, Message,
    MessageId, NodeSnapshot, OfpcRouter, Protocol, ProphetParams, ProphetRouter, Router, TieStrength,
};
use crate::trace::{ContactTrace, NodeId};

use super::events::{build_events, epoch_times, EventKind};
use super::metrics::{aggregate_runs, compute_metrics, AggregateRow, MetricsRow};
use super::schedule::{social_schedule, OwnTies, SocialSchedule};
use super::workload::generate_workload;
use super::EngineError;

/// TTL sweep used when none is given, seconds.
pub const DEFAULT_TTLS: [f64; 6] = [1800.0, 3600.0, 7200.0, 14_400.0, 28_800.0, 43_200.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub protocols: Vec<Protocol>,
    pub n_messages: usize,
    pub ttl_list: Vec<f64>,
    pub runs: usize,
    /// Community recomputation period; `None` means duration / 24.
    pub epoch: Option<f64>,
    pub decay: DecayParams,
    pub community: CommunityParams,
    pub prophet: ProphetParams,
    /// Flood start times per node for Bubble's offline ranks.
    pub bubble_starts: usize,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            protocols: Protocol::ALL.to_vec(),
            n_messages: 1000,
            ttl_list: DEFAULT_TTLS.to_vec(),
            runs: 50,
            epoch: None,
            decay: DecayParams::default(),
            community: CommunityParams::default(),
            prophet: ProphetParams::default(),
            bubble_starts: 8,
            seed: 1,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |s: String| Err(EngineError::InvalidConfig(s));
        if self.protocols.is_empty() {
            return bad("no protocols listed".into());
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.n_messages == 0 {
            return bad("messages must be at least 1".into());
        }
        if self.ttl_list.is_empty() {
            return bad("ttl list is empty".into());
        }
        if let Some(t) = self.ttl_list.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return bad(format!("ttl {t} is not a positive finite number"));
        }
        if let Some(e) = self.epoch.filter(|e| !(*e > 0.0) || !e.is_finite()) {
            return bad(format!("epoch {e} is not a positive finite number"));
        }
        self.decay.validate()?;
        if let Err(e) = self.community.validate() {
            return bad(e.to_string());
        }
        Ok(())
    }

    pub fn max_ttl(&self) -> f64 {
        self.ttl_list.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn epoch_for(&self, trace: &ContactTrace) -> f64 {
        self.epoch.unwrap_or(trace.duration() / 24.0)
    }
}

/// A move is logged as a copy followed by a delete at the sender.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogEvent {
    Copy,
    Deliver,
    Delete,
}

impl LogEvent {
    pub fn name(self) -> &'static str {
        match self {
            LogEvent::Copy => "copy",
            LogEvent::Deliver => "deliver",
            LogEvent::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub time: f64,
    pub protocol: Protocol,
    pub event: LogEvent,
    pub msg: MessageId,
    pub from: NodeId,
    pub to: NodeId,
}

pub fn log_to_csv(entries: &[LogEntry]) -> String {
    let mut out = String::from("time,protocol,event,msg,from,to\n");
    for e in entries {
        let _ = writeln!(out, "{},{},{},{},{},{}", e.time, e.protocol, e.event.name(), e.msg, e.from, e.to);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageOutcome {
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    pub created: f64,
    pub ttl: f64,
    /// First arrival at the destination.
    pub delivered_at: Option<f64>,
    /// Every node that ever held the message, with the time it first did.
    /// Starts with the source; the destination joins on delivery.
    pub infections: Vec<(NodeId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub protocol: Protocol,
    pub run: usize,
    pub end_time: f64,
    pub outcomes: Vec<MessageOutcome>,
    pub log: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub raw: Vec<MetricsRow>,
    pub aggregate: Vec<AggregateRow>,
}

/// Per-trace state shared by every run: epoch schedule, social states, tie
/// strengths and Bubble ranks, each built only if a listed protocol needs it.
#[derive(Debug)]
pub struct Simulator<'t> {
    trace: &'t ContactTrace,
    config: SimulationConfig,
    epochs: Vec<f64>,
    schedule: Option<SocialSchedule>,
    ties: Option<OwnTies>,
    bubble: Option<Arc<BubbleRanks>>,
}

impl<'t> Simulator<'t> {
    pub fn new(trace: &'t ContactTrace, config: SimulationConfig) -> Result<Self, EngineError> {
        config.validate()?;
        if trace.n() < 2 {
            return Err(EngineError::TooFewNodes(trace.n()));
        }
        let epochs = epoch_times(trace.duration(), config.epoch_for(trace));
        let mut sim = Simulator { trace, config, epochs, schedule: None, ties: None, bubble: None };
        if sim.config.protocols.contains(&Protocol::Ofpc) {
            sim.schedule = Some(social_schedule(trace, sim.config.decay, &sim.config.community, &sim.epochs)?);
            sim.ties = Some(OwnTies::new(trace, sim.config.decay.beta));
        }
        if sim.config.protocols.contains(&Protocol::Bubble) {
            sim.bubble = Some(Arc::new(bubble_precompute(trace, &sim.config.community, sim.config.bubble_starts)));
        }
        Ok(sim)
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn social_schedule(&self) -> Option<&SocialSchedule> {
        self.schedule.as_ref()
    }

    /// Workload of run `run`; every protocol sees the same one.
    pub fn workload(&self, run: usize) -> Result<Vec<Message>, EngineError> {
        let c = &self.config;
        generate_workload(self.trace.n(), self.trace.duration(), c.n_messages, c.max_ttl(), c.seed, run as u64)
    }

    fn router(&self, protocol: Protocol) -> Result<Box<dyn Router>, EngineError> {
        Ok(match protocol {
            Protocol::Epidemic => Box::new(EpidemicRouter),
            Protocol::Direct => Box::new(DirectRouter),
            Protocol::Prophet => Box::new(ProphetRouter::new(self.trace.n(), self.config.prophet)),
            Protocol::Ofpc if self.schedule.is_some() => Box::new(OfpcRouter),
            Protocol::Bubble => match &self.bubble {
                Some(r) => Box::new(BubbleRouter::new(Arc::clone(r))),
                None => return Err(EngineError::NotPrepared(protocol)),
            },
            Protocol::Ofpc => return Err(EngineError::NotPrepared(protocol)),
        })
    }

    /// One run of one protocol. Message ids must be unique and every node
    /// index must be below the trace's `n`.
    pub fn run(&self, protocol: Protocol, workload: &[Message], run: usize, with_log: bool) -> Result<RunRecord, EngineError> {
        let n = self.trace.n();
        if let Some(m) = workload.iter().find(|m| m.src >= n || m.dst >= n || m.src == m.dst) {
            return Err(EngineError::InvalidConfig(format!("message {} has endpoints {}→{} outside 0..{n}", m.id, m.src, m.dst)));
        }
        let index: HashMap<MessageId, usize> = workload.iter().enumerate().map(|(i, m)| (m.id, i)).collect();
        if index.len() != workload.len() {
            return Err(EngineError::InvalidConfig("duplicate message ids".into()));
        }
        let mut router = self.router(protocol)?;
        let epochs: &[f64] = if protocol.needs_social_state() { &self.epochs } else { &[] };
        let events = build_events(self.trace, workload, epochs);

        let mut queues: Vec<BTreeSet<MessageId>> = vec![BTreeSet::new(); n];
        let mut outcomes: Vec<MessageOutcome> = workload
            .iter()
            .map(|m| MessageOutcome {
                id: m.id,
                src: m.src,
                dst: m.dst,
                created: m.created,
                ttl: m.ttl,
                delivered_at: None,
                infections: Vec::new(),
            })
            .collect();
        let mut held = vec![vec![false; n]; workload.len()];
        let mut infect = |outcomes: &mut Vec<MessageOutcome>, i: usize, u: NodeId, t: f64| {
            if !held[i][u] {
                held[i][u] = true;
                outcomes[i].infections.push((u, t));
            }
        };
        let mut log = Vec::new();
        let mut record = |time, event, msg, from, to| {
            if with_log {
                log.push(LogEntry { time, protocol, event, msg, from, to });
            }
        };
        let ties = self.ties.as_ref().map(|t| t as &dyn TieStrength);
        let mut epoch: Option<usize> = None;

        for ev in events {
            let now = ev.time;
            match ev.kind {
                EventKind::EpochBoundary => epoch = Some(ev.index),
                EventKind::MessageCreate => {
                    let i = index[&ev.index];
                    queues[workload[i].src].insert(ev.index);
                    infect(&mut outcomes, i, workload[i].src, now);
                }
                EventKind::ContactEnd => {}
                EventKind::MessageExpiry => {
                    for q in &mut queues {
                        q.remove(&ev.index);
                    }
                }
                EventKind::ContactStart => {
                    let c = &self.trace.events()[ev.index];
                    let (a, b) = (c.node_a, c.node_b);
                    router.on_contact_start(a, b, now);
                    if queues[a].is_empty() && queues[b].is_empty() {
                        continue;
                    }
                    let social = epoch.and_then(|e| self.schedule.as_ref().map(|s| &s.states[e]));
                    let snap = |u: NodeId| NodeSnapshot { id: u, social: social.map(|s| &s[u]), ties };
                    let enc = Encounter { now, carrier: snap(a), peer: snap(b) };
                    let d = on_contact(router.as_ref(), &enc, &queues[a], &queues[b], |id| &workload[index[&id]]);
                    for (id, from, to) in d.deliveries {
                        let i = index[&id];
                        if outcomes[i].delivered_at.is_none() {
                            outcomes[i].delivered_at = Some(now);
                        }
                        infect(&mut outcomes, i, to, now);
                        queues[from].remove(&id);
                        record(now, LogEvent::Deliver, id, from, to);
                    }
                    for t in d.transfers {
                        queues[t.to].insert(t.msg);
                        infect(&mut outcomes, index[&t.msg], t.to, now);
                        if t.moved {
                            queues[t.from].remove(&t.msg);
                        }
                        record(now, LogEvent::Copy, t.msg, t.from, t.to);
                        if t.moved {
                            record(now, LogEvent::Delete, t.msg, t.from, t.to);
                        }
                    }
                    for (node, id) in d.deletions {
                        let other = if node == a { b } else { a };
                        // never drop the last copy when both sides chose to delete
                        if queues[other].contains(&id) && queues[node].remove(&id) {
                            record(now, LogEvent::Delete, id, node, other);
                        }
                    }
                }
            }
        }
        Ok(RunRecord { protocol, run, end_time: self.trace.duration(), outcomes, log })
    }

    /// Every (protocol, run) pair, in protocol-major order.
    pub fn run_all(&self, with_log: bool) -> Result<Vec<RunRecord>, EngineError> {
        let workloads: Vec<Vec<Message>> = (0..self.config.runs).map(|r| self.workload(r)).collect::<Result<_, _>>()?;
        let jobs: Vec<(Protocol, usize)> =
            self.config.protocols.iter().flat_map(|&p| (0..self.config.runs).map(move |r| (p, r))).collect();
        jobs.par_iter().map(|&(p, r)| self.run(p, &workloads[r], r, with_log)).collect()
    }

    /// Raw per-run metrics at every TTL plus their aggregates.
    pub fn report(&self) -> Result<SimulationReport, EngineError> {
        let records = self.run_all(false)?;
        let raw: Vec<MetricsRow> = records
            .iter()
            .flat_map(|rec| self.config.ttl_list.iter().map(move |&ttl| compute_metrics(rec, ttl)))
            .collect();
        let aggregate = aggregate_runs(&raw);
        Ok(SimulationReport { raw, aggregate })
    }
}

/// One run of `protocol` over a given workload.
pub fn run_simulation(
    trace: &ContactTrace,
    workload: &[Message],
    config: &SimulationConfig,
    protocol: Protocol,
) -> Result<RunRecord, EngineError> {
    let cfg = SimulationConfig { protocols: vec![protocol], ..config.clone() };
    Simulator::new(trace, cfg)?.run(protocol, workload, 0, true)
}

/// Every listed protocol over `runs` workloads.
pub fn simulate(trace: &ContactTrace, config: &SimulationConfig) -> Result<SimulationReport, EngineError> {
    Simulator::new(trace, config.clone())?.report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::metrics::outcome_counts;
    use crate::trace::{generate_planted_trace, ContactEvent, PlantedTraceSpec};

    fn chain() -> ContactTrace {
        ContactTrace::from_events(
            3,
            100.0,
            vec![ContactEvent { node_a: 0, node_b: 1, on: 10.0, off: 12.0 }, ContactEvent { node_a: 1, node_b: 2, on: 30.0, off: 31.0 }],
        )
    }

    fn one(src: NodeId, dst: NodeId, created: f64) -> Vec<Message> {
        vec![Message { id: 0, src, dst, created, ttl: 1000.0, size: 1 }]
    }

    fn config(p: Protocol) -> SimulationConfig {
        SimulationConfig { protocols: vec![p], runs: 2, n_messages: 40, ..SimulationConfig::default() }
    }

    #[test]
    fn epidemic_crosses_two_hop_chain() {
        let rec = run_simulation(&chain(), &one(0, 2, 5.0), &config(Protocol::Epidemic), Protocol::Epidemic).unwrap();
        assert_eq!(rec.outcomes[0].delivered_at, Some(30.0));
        assert_eq!(compute_metrics(&rec, 1000.0).mdd, Some(25.0));
        assert_eq!(rec.outcomes[0].infections, vec![(0, 5.0), (1, 10.0), (2, 30.0)]);
    }

    #[test]
    fn direct_never_relays() {
        let rec = run_simulation(&chain(), &one(0, 2, 5.0), &config(Protocol::Direct), Protocol::Direct).unwrap();
        assert_eq!(rec.outcomes[0].delivered_at, None);
        let m = compute_metrics(&rec, 1000.0);
        assert_eq!((m.pdr, m.mdd, m.cost), (0.0, None, 1.0));
        let rec = run_simulation(&chain(), &one(0, 1, 5.0), &config(Protocol::Direct), Protocol::Direct).unwrap();
        assert_eq!(compute_metrics(&rec, 1000.0).cost, 2.0);
    }

    #[test]
    fn message_created_after_contact_misses_it() {
        let rec = run_simulation(&chain(), &one(0, 1, 10.5), &config(Protocol::Epidemic), Protocol::Epidemic).unwrap();
        assert_eq!(rec.outcomes[0].delivered_at, None);
    }

    #[test]
    fn expiry_at_contact_instant_still_forwards() {
        let w = vec![Message { id: 0, src: 0, dst: 1, created: 0.0, ttl: 10.0, size: 1 }];
        let rec = run_simulation(&chain(), &w, &config(Protocol::Epidemic), Protocol::Epidemic).unwrap();
        assert_eq!(rec.outcomes[0].delivered_at, Some(10.0));
        let w = vec![Message { ttl: 9.0, ..w[0].clone() }];
        let rec = run_simulation(&chain(), &w, &config(Protocol::Epidemic), Protocol::Epidemic).unwrap();
        assert_eq!(rec.outcomes[0].delivered_at, None);
    }

    fn planted() -> ContactTrace {
        let spec = PlantedTraceSpec { duration: 6.0 * 3600.0, ..PlantedTraceSpec::default() };
        generate_planted_trace(&spec).unwrap().trace
    }

    #[test]
    fn runs_conserve_messages_and_repeat_exactly() {
        let trace = planted();
        let cfg = SimulationConfig { runs: 2, n_messages: 60, ..SimulationConfig::default() };
        let sim = Simulator::new(&trace, cfg).unwrap();
        let a = sim.run_all(true).unwrap();
        assert_eq!(a, sim.run_all(true).unwrap());
        for rec in &a {
            for &ttl in &sim.config().ttl_list {
                let c = outcome_counts(rec, ttl);
                assert_eq!(c.delivered + c.expired + c.in_flight, c.created);
            }
        }
    }

    #[test]
    fn unprepared_protocol_is_an_error() {
        let trace = planted();
        let sim = Simulator::new(&trace, config(Protocol::Direct)).unwrap();
        let w = sim.workload(0).unwrap();
        assert_eq!(sim.run(Protocol::Ofpc, &w, 0, false).unwrap_err(), EngineError::NotPrepared(Protocol::Ofpc));
    }

    #[test]
    fn config_validation() {
        let ok = SimulationConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SimulationConfig { runs: 0, ..ok.clone() }.validate().is_err());
        assert!(SimulationConfig { n_messages: 0, ..ok.clone() }.validate().is_err());
        assert!(SimulationConfig { ttl_list: vec![-1.0], ..ok.clone() }.validate().is_err());
        assert!(SimulationConfig { protocols: vec![], ..ok }.validate().is_err());
    }
}
