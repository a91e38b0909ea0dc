//! One OFPC run with its decision log and metrics at several TTLs.

use ofpc::engine::{compute_metrics, log_to_csv, run_simulation, SimulationConfig};
use ofpc::routing::Protocol;
use ofpc::trace::{generate_planted_trace, PlantedTraceSpec};

fn main() {
    let spec = PlantedTraceSpec { duration: 6.0 * 3600.0, ..PlantedTraceSpec::default() };
    let trace = generate_planted_trace(&spec).expect("valid spec").trace;
    let config = SimulationConfig { n_messages: 20, ..SimulationConfig::default() };
    let workload = ofpc::engine::generate_workload(trace.n(), trace.duration(), 20, config.max_ttl(), 7, 0).unwrap();
    let record = run_simulation(&trace, &workload, &config, Protocol::Ofpc).expect("valid run");

    let log = log_to_csv(&record.log);
    for line in log.lines().take(12) {
        println!("{line}");
    }
    println!("... {} decisions", record.log.len());
    for ttl in [600.0, 3600.0, 43_200.0] {
        let m = compute_metrics(&record, ttl);
        println!("ttl {ttl:>7}: pdr {:.2}  mdd {:?}  cost {:.2}", m.pdr, m.mdd.map(|d| d.round()), m.cost);
    }
}
