use super::{Action, Encounter, Message, Protocol, Router};

/// Floods every message to every peer that lacks it.
#[derive(Debug, Clone, Copy, Default)]
pub struct EpidemicRouter;

impl Router for EpidemicRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Epidemic
    }

    fn decide(&self, _: &Encounter<'_>, _: &Message, peer_has: bool) -> Action {
        if peer_has {
            Action::Keep
        } else {
            Action::Copy
        }
    }
}
