//! Runs every protocol over one planted trace and prints the aggregate table.

use ofpc::engine::{simulate, SimulationConfig};
use ofpc::trace::{generate_planted_trace, PlantedTraceSpec};

fn main() {
    let planted = generate_planted_trace(&PlantedTraceSpec::default()).expect("default spec is valid");
    let config = SimulationConfig { n_messages: 200, runs: 5, ..SimulationConfig::default() };
    let report = simulate(&planted.trace, &config).expect("simulation runs");

    println!("{:<9} {:>7} {:>6} {:>9} {:>6}", "protocol", "ttl", "pdr", "mdd", "cost");
    for row in &report.aggregate {
        let mdd = row.mdd.map_or("-".to_string(), |s| format!("{:.0}", s.mean));
        println!("{:<9} {:>7} {:>6.3} {:>9} {:>6.2}", row.protocol, row.ttl, row.pdr.mean, mdd, row.cost.mean);
    }
}
