//! Number of communities at every epoch of a planted trace.

use ofpc::community::CommunityParams;
use ofpc::decayed_graph::DecayParams;
use ofpc::engine::{community_timeline, summarize_timeline, timeline_csv};
use ofpc::trace::{generate_planted_trace, PlantedTraceSpec};

fn main() {
    let trace = generate_planted_trace(&PlantedTraceSpec::default()).expect("default spec is valid").trace;
    let rows = community_timeline(&trace, DecayParams::default(), &CommunityParams::default(), trace.duration() / 24.0);
    print!("{}", timeline_csv(&rows));
    if let Some(s) = summarize_timeline(&rows, 0) {
        println!("max {}  min {}  mean {:.3}  variance {:.4}", s.max, s.min, s.mean, s.variance);
    }
}
