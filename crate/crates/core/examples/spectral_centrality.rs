//! PCA of a planted trace's decayed graph: chosen k, SNR and partial
//! centrality for a few nodes.

use ofpc::decayed_graph::aggregate_matrix;
use ofpc::spectral::{pca, snr, total_partial_centrality, NodeSpectralCoords, PcaOptions, PrincipalSubspace};
use ofpc::trace::{generate_planted_trace, PlantedTraceSpec};

fn main() {
    let planted = generate_planted_trace(&PlantedTraceSpec::default()).expect("default spec is valid");
    let trace = &planted.trace;
    let w = aggregate_matrix(trace, trace.duration(), 1.0 / 3600.0);

    let opts = PcaOptions::default();
    let p = pca(&w, opts).expect("finite symmetric input");
    let sub = PrincipalSubspace::select(&p.decomposition, 0.85).expect("nonzero spectrum");
    let coords = NodeSpectralCoords::from_pca(&p, opts.alpha);
    let lambda = &p.decomposition.eigenvalues;
    println!("leading eigenvalues {:.1?}", &lambda[..5]);
    println!("k = {}", sub.k);

    for u in [0, 11, 12, 20, 28] {
        let s = snr(u, lambda, &coords, sub.k).unwrap();
        let pcs: Vec<String> =
            (0..sub.k).map(|i| format!("{:8.2}", total_partial_centrality(u, &[i], &coords, &sub).unwrap())).collect();
        println!("node {u:>2} {:<34} snr {s:>10.3e}  pc [{}]", format!("{:?}", planted.roles[u]), pcs.join(", "));
    }
}
