//! The OFPC decision for a few encounters, including one where the node with
//! the lower overall degree is the better relay.

use ofpc::community::Category;
use ofpc::routing::{ofpc_decide, OfpcInput};
use ofpc::spectral::{degree_centrality, partial_degree_centrality, Matrix};

fn main() {
    // u has degree 5 but only 2 neighbours in the destination's community;
    // v has degree 4 with 3 of them there
    let edges = [(0, 1), (0, 2), (0, 3), (0, 6), (0, 7), (1, 7), (1, 8), (1, 9)];
    let adj = Matrix::from_fn(10, 10, |r, c| if edges.contains(&(r, c)) || edges.contains(&(c, r)) { 1.0 } else { 0.0 });
    let dest_community = [6, 7, 8, 9];
    let (u, v) = (0, 1);
    let (du, dv) = (degree_centrality(&adj, u), degree_centrality(&adj, v));
    let (pu, pv) = (partial_degree_centrality(&adj, u, &dest_community), partial_degree_centrality(&adj, v, &dest_community));
    println!("degree u={du} v={dv}; partial u={pu} v={pv}");

    let base = OfpcInput {
        peer_is_destination: false,
        peer_has: false,
        carrier: Category::Strong,
        peer: Category::Strong,
        destination_has_community: true,
        carrier_shares: false,
        peer_shares: false,
        pc_carrier: pu as f64,
        pc_peer: pv as f64,
        w_carrier: 0.0,
        w_peer: 0.0,
    };
    let cases = [
        ("partial centrality decides", base),
        ("peer is noise", OfpcInput { peer: Category::Noise, ..base }),
        ("carrier is noise", OfpcInput { carrier: Category::Noise, ..base }),
        ("peer enters the community", OfpcInput { peer_shares: true, pc_peer: 0.0, ..base }),
        ("carrier already inside", OfpcInput { carrier_shares: true, ..base }),
        (
            "peer inside holds a copy",
            OfpcInput { peer_has: true, peer_shares: true, w_carrier: 0.2, w_peer: 0.9, ..base },
        ),
    ];
    for (name, x) in cases {
        println!("{name:<28} {:?}", ofpc_decide(&x));
    }
}
