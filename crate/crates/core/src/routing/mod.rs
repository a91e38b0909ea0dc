//! Forwarding protocols behind one interface.
//!
//! The engine calls [`on_contact`] at every contact start. Each protocol only
//! answers a per-message question through [`Router::decide`]: what should the
//! carrier do with this message now that it meets this peer. Both directions
//! are evaluated against the queues as they stood before the contact.

mod bubble;
mod direct;
mod epidemic;
mod ofpc;
mod prophet;
mod social;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::decayed_graph::DecayedGraphView;
use crate::trace::NodeId;

pub use bubble::{bubble_precompute, flood_relay_counts, BubbleRanks, BubbleRouter};
pub use direct::DirectRouter;
pub use epidemic::EpidemicRouter;
pub use ofpc::{ofpc_decide, OfpcInput, OfpcRouter};
pub use prophet::{ProphetParams, ProphetRouter};
pub use social::{match_labels, recompute_social_state, NodeSocialState};

pub type MessageId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("unknown protocol '{0}' (expected ofpc, epidemic, direct, prophet or bubble)")]
    UnknownProtocol(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    pub created: f64,
    pub ttl: f64,
    pub size: u32,
}

impl Message {
    pub fn expired(&self, now: f64) -> bool {
        now - self.created > self.ttl
    }
}

/// What a carrier does with one message when meeting a peer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Keep,
    /// Peer is the destination; the carrier drops its copy.
    Deliver,
    /// Peer receives a copy; carrier keeps its own.
    Copy,
    /// Peer receives a copy; carrier drops its own.
    Move,
    /// Carrier drops its copy; peer already holds one.
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Ofpc,
    Epidemic,
    Direct,
    Prophet,
    Bubble,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [Protocol::Epidemic, Protocol::Ofpc, Protocol::Prophet, Protocol::Bubble, Protocol::Direct];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Ofpc => "ofpc",
            Protocol::Epidemic => "epidemic",
            Protocol::Direct => "direct",
            Protocol::Prophet => "prophet",
            Protocol::Bubble => "bubble",
        }
    }

    /// Whether the protocol reads per-node social state and graph views.
    pub fn needs_social_state(self) -> bool {
        self == Protocol::Ofpc
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Protocol {
    type Err = RoutingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ofpc" => Ok(Protocol::Ofpc),
            "epidemic" => Ok(Protocol::Epidemic),
            "direct" => Ok(Protocol::Direct),
            "prophet" => Ok(Protocol::Prophet),
            "bubble" => Ok(Protocol::Bubble),
            other => Err(RoutingError::UnknownProtocol(other.to_string())),
        }
    }
}

/// Decayed tie strength of edge `(u, v)` as node `u` knows it at `now`.
pub trait TieStrength: Sync {
    fn tie_strength(&self, u: NodeId, v: NodeId, now: f64) -> f64;
}

impl TieStrength for DecayedGraphView {
    fn tie_strength(&self, u: NodeId, v: NodeId, now: f64) -> f64 {
        self.weight_at(u, v, now).unwrap_or(0.0)
    }
}

/// Everything a protocol may look at about one side of an encounter.
#[derive(Clone, Copy)]
pub struct NodeSnapshot<'a> {
    pub id: NodeId,
    /// Latest epoch state; `None` before the first epoch.
    pub social: Option<&'a NodeSocialState>,
    pub ties: Option<&'a dyn TieStrength>,
}

impl fmt::Debug for NodeSnapshot<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NodeSnapshot").field("id", &self.id).field("social", &self.social.is_some()).finish()
    }
}

impl<'a> NodeSnapshot<'a> {
    pub fn bare(id: NodeId) -> Self {
        NodeSnapshot { id, social: None, ties: None }
    }
}

/// One direction of a contact: `carrier` considers handing messages to `peer`.
#[derive(Debug, Clone, Copy)]
pub struct Encounter<'a> {
    pub now: f64,
    pub carrier: NodeSnapshot<'a>,
    pub peer: NodeSnapshot<'a>,
}

impl<'a> Encounter<'a> {
    pub fn reversed(&self) -> Self {
        Encounter { now: self.now, carrier: self.peer, peer: self.carrier }
    }
}

pub trait Router: Send {
    fn protocol(&self) -> Protocol;

    /// Hook run once per contact start before any decision.
    fn on_contact_start(&mut self, _a: NodeId, _b: NodeId, _now: f64) {}

    /// Decision for a message the carrier holds. `peer_has` tells whether the
    /// peer held it before the contact. Destination delivery is handled by
    /// [`on_contact`] and never reaches this method.
    fn decide(&self, encounter: &Encounter<'_>, message: &Message, peer_has: bool) -> Action;

    /// Decisions for every message one carrier holds, in order.
    fn decide_all(&self, encounter: &Encounter<'_>, items: &[(&Message, bool)]) -> Vec<Action> {
        items.iter().map(|&(m, has)| self.decide(encounter, m, has)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transfer {
    pub msg: MessageId,
    pub from: NodeId,
    pub to: NodeId,
    /// Carrier drops its copy after the hand-over.
    pub moved: bool,
}

/// All effects of one contact start.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForwardingDecision {
    pub transfers: Vec<Transfer>,
    /// `(node, message)` copies dropped without a hand-over.
    pub deletions: Vec<(NodeId, MessageId)>,
    /// `(message, from, to)` arrivals at the destination.
    pub deliveries: Vec<(MessageId, NodeId, NodeId)>,
}

impl ForwardingDecision {
    pub fn is_empty(&self) -> bool {
        self.transfers.is_empty() && self.deletions.is_empty() && self.deliveries.is_empty()
    }
}

/// Evaluates both directions of a contact against pre-contact queues.
///
/// `lookup` resolves a message id; the queues must hold only live messages.
pub fn on_contact<'m>(
    router: &dyn Router,
    encounter: &Encounter<'_>,
    carrier_queue: &BTreeSet<MessageId>,
    peer_queue: &BTreeSet<MessageId>,
    lookup: impl Fn(MessageId) -> &'m Message,
) -> ForwardingDecision {
    let mut out = ForwardingDecision::default();
    let reversed = encounter.reversed();
    for (enc, mine, theirs) in [(encounter, carrier_queue, peer_queue), (&reversed, peer_queue, carrier_queue)] {
        let from = enc.carrier.id;
        let to = enc.peer.id;
        let mut pending = Vec::new();
        for &id in mine {
            let m = lookup(id);
            if m.dst == to {
                out.deliveries.push((id, from, to));
            } else {
                pending.push((m, theirs.contains(&id)));
            }
        }
        for ((m, _), action) in pending.iter().zip(router.decide_all(enc, &pending)) {
            let id = m.id;
            match action {
                Action::Keep => {}
                Action::Deliver => out.deliveries.push((id, from, to)),
                Action::Copy => out.transfers.push(Transfer { msg: id, from, to, moved: false }),
                Action::Move => out.transfers.push(Transfer { msg: id, from, to, moved: true }),
                Action::Delete => out.deletions.push((from, id)),
            }
        }
    }
    out
}
