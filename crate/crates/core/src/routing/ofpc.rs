use std::collections::BTreeSet;

use crate::community::Category;

use super::social::match_labels;
use super::{Action, Encounter, Message, Protocol, Router};

/// Everything the OFPC rule needs about one (carrier, peer, message) triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfpcInput {
    pub peer_is_destination: bool,
    pub peer_has: bool,
    /// Self-reported categories.
    pub carrier: Category,
    pub peer: Category,
    /// The destination carries at least one label in the carrier's view.
    pub destination_has_community: bool,
    pub carrier_shares: bool,
    pub peer_shares: bool,
    /// Partial centralities relative to the destination's communities.
    pub pc_carrier: f64,
    pub pc_peer: f64,
    /// Decayed tie strength of each side to the destination.
    pub w_carrier: f64,
    pub w_peer: f64,
}

/// The OFPC forwarding rule for one message.
pub fn ofpc_decide(x: &OfpcInput) -> Action {
    if x.peer_is_destination {
        return Action::Deliver;
    }
    if x.peer_has {
        let enters_community = x.peer_shares && !x.carrier_shares && x.w_carrier < x.w_peer;
        return if enters_community { Action::Delete } else { Action::Keep };
    }
    if x.peer == Category::Noise {
        return Action::Keep;
    }
    if x.carrier == Category::Noise {
        return Action::Move;
    }
    if !x.destination_has_community {
        return if x.w_peer > x.w_carrier { Action::Copy } else { Action::Keep };
    }
    let copy = match (x.carrier_shares, x.peer_shares) {
        (false, false) => x.pc_carrier < x.pc_peer,
        (false, true) => true,
        (true, true) => x.pc_carrier < x.pc_peer,
        (true, false) => false,
    };
    if copy {
        Action::Copy
    } else {
        Action::Keep
    }
}

/// OFPC over per-node social state and graph views.
#[derive(Debug, Clone, Copy, Default)]
pub struct OfpcRouter;

fn category_of(enc_side: &super::NodeSnapshot<'_>) -> Category {
    match enc_side.social {
        Some(s) if s.structured => s.assignment.category[enc_side.id],
        _ => Category::Noise,
    }
}

impl OfpcRouter {
    /// Builds the rule input for one message.
    pub fn input(&self, enc: &Encounter<'_>, m: &Message, peer_has: bool) -> OfpcInput {
        let label_map = match (enc.carrier.social, enc.peer.social) {
            (Some(a), Some(b)) => match_labels(&a.assignment, &b.assignment),
            _ => Vec::new(),
        };
        self.input_with_map(enc, m, peer_has, &label_map)
    }

    fn input_with_map(&self, enc: &Encounter<'_>, m: &Message, peer_has: bool, label_map: &[Option<usize>]) -> OfpcInput {
        let (u, v, d) = (enc.carrier.id, enc.peer.id, m.dst);
        let weight = |side: &super::NodeSnapshot<'_>| {
            side.ties.map_or(0.0, |t| t.tie_strength(side.id, d, enc.now))
        };
        let mut x = OfpcInput {
            peer_is_destination: v == d,
            peer_has,
            carrier: category_of(&enc.carrier),
            peer: category_of(&enc.peer),
            destination_has_community: false,
            carrier_shares: false,
            peer_shares: false,
            pc_carrier: 0.0,
            pc_peer: 0.0,
            w_carrier: weight(&enc.carrier),
            w_peer: weight(&enc.peer),
        };
        let Some(mine) = enc.carrier.social.filter(|s| s.structured) else {
            return x;
        };
        let dest_labels = mine.labels(d);
        x.destination_has_community = !dest_labels.is_empty();
        x.carrier_shares = mine.shares_community(u, d);
        x.peer_shares = mine.shares_community(v, d);
        x.pc_carrier = mine.partial_centrality_over(u, dest_labels);
        if let Some(theirs) = enc.peer.social.filter(|s| s.structured) {
            let mapped: BTreeSet<usize> = dest_labels.iter().filter_map(|&l| label_map.get(l).copied().flatten()).collect();
            x.pc_peer = theirs.partial_centrality_over(v, &mapped);
        }
        x
    }
}

impl Router for OfpcRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Ofpc
    }

    fn decide(&self, enc: &Encounter<'_>, m: &Message, peer_has: bool) -> Action {
        ofpc_decide(&self.input(enc, m, peer_has))
    }

    fn decide_all(&self, enc: &Encounter<'_>, items: &[(&Message, bool)]) -> Vec<Action> {
        let label_map = match (enc.carrier.social, enc.peer.social) {
            (Some(a), Some(b)) => match_labels(&a.assignment, &b.assignment),
            _ => Vec::new(),
        };
        items.iter().map(|&(m, has)| ofpc_decide(&self.input_with_map(enc, m, has, &label_map))).collect()
    }
}
