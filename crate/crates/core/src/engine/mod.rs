//! Discrete-event simulation over a contact trace.
//!
//! One run replays the trace once for one protocol and one workload, firing
//! the router at every contact start. Runs are independent and execute in
//! parallel; all of them share the precomputed per-trace state held by
//! [`Simulator`].

mod events;
mod metrics;
mod schedule;
mod sim;
mod timeline;
mod workload;

use thiserror::Error;

use crate::decayed_graph::GraphError;

pub use events::{build_events, epoch_times, EventKind, SimEvent};
pub use metrics::{
    aggregate_csv, aggregate_runs, compute_metrics, metrics_csv, outcome_counts, summarize, AggregateRow, MetricsRow,
    OutcomeCounts, Summary,
};
pub use schedule::{social_schedule, OwnTies, SocialSchedule};
pub use sim::{
    log_to_csv, run_simulation, simulate, LogEntry, LogEvent, MessageOutcome, RunRecord, SimulationConfig,
    SimulationReport, Simulator, DEFAULT_TTLS,
};
pub use timeline::{community_timeline, summarize_timeline, timeline_csv, TimelineRow, TimelineSummary};
pub use workload::{generate_workload, CREATION_WINDOW};

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("workload needs at least 2 nodes, trace has {0}")]
    TooFewNodes(usize),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("protocol {0} was not prepared by this simulator")]
    NotPrepared(crate::routing::Protocol),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
