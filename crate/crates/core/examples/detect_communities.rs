//! Community detection on a planted trace, compared with the planted roles.

use ofpc::community::{detect_communities, CommunityParams};
use ofpc::decayed_graph::aggregate_matrix;
use ofpc::trace::{generate_planted_trace, PlantedTraceSpec};

fn main() {
    let planted = generate_planted_trace(&PlantedTraceSpec::default()).expect("default spec is valid");
    let trace = &planted.trace;
    let w = aggregate_matrix(trace, trace.duration(), 1.0 / 3600.0);
    let analysis = detect_communities(&w, &CommunityParams::default()).expect("planted structure");
    let a = &analysis.assignment;

    println!("k = {}", analysis.k());
    for u in 0..a.n() {
        let labels: Vec<usize> = a.com[u].iter().map(|c| c + 1).collect();
        println!("node {u:>2}  planted {:<34} detected {:<9} {:?}", format!("{:?}", planted.roles[u]), a.category[u], labels);
    }
    let s = a.stats();
    println!("noise {:.1}%  bridging {:.1}%  strong {:.1}%", s.noise_pct, s.bridging_pct, s.strong_pct);
}
