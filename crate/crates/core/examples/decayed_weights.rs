//! Lazily decayed tie strength and view gossip between two nodes.

use ofpc::decayed_graph::{brute_force_weight, exchange_views, DecayParams, DecayedGraphView, DecayedWeight};

fn main() {
    let beta = 1.0 / 3600.0;
    let contacts = [(0.0, 300.0), (1800.0, 1860.0), (7200.0, 9000.0)];

    let mut w = DecayedWeight::default();
    for &(on, off) in &contacts {
        w.add_contact(on, off, beta).expect("contacts in order");
    }
    let t = 10_800.0;
    println!("lazy        {:.6}", w.read(t, beta).unwrap());
    println!("brute force {:.6}", brute_force_weight(&contacts, t, beta));

    // node 0 meets 1, then 1 meets 2; gossip carries 0's row to 2
    let params = DecayParams::default();
    let mut views: Vec<DecayedGraphView> = (0..3).map(|u| DecayedGraphView::new(u, 3, params).unwrap()).collect();
    for &(a, b, on, off) in &[(0, 1, 0.0, 600.0), (1, 2, 1000.0, 1200.0)] {
        views[a].record_contact(b, on, off).unwrap();
        views[b].record_contact(a, on, off).unwrap();
        let (lo, hi) = views.split_at_mut(b);
        exchange_views(&mut lo[a], &mut hi[0]).unwrap();
    }
    println!("node 2 sees w(0,1) = {:.3}", views[2].weight_at(0, 1, 1200.0).unwrap());
}
