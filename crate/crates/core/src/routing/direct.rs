use super::{Action, Encounter, Message, Protocol, Router};

/// Source holds the message until it meets the destination.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectRouter;

impl Router for DirectRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Direct
    }

    fn decide(&self, _: &Encounter<'_>, _: &Message, _: bool) -> Action {
        Action::Keep
    }
}

#[cfg(test)]
mod tests {
    use super::super::{on_contact, tests::msg, NodeSnapshot};
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn delivers_only_to_destination() {
        let messages = [msg(0, 0, 1), msg(1, 0, 2)];
        let enc = Encounter { now: 0.0, carrier: NodeSnapshot::bare(0), peer: NodeSnapshot::bare(1) };
        let d = on_contact(&DirectRouter, &enc, &BTreeSet::from([0, 1]), &BTreeSet::new(), |i| &messages[i]);
        assert_eq!(d.deliveries, vec![(0, 0, 1)]);
        assert!(d.transfers.is_empty());
    }
}
