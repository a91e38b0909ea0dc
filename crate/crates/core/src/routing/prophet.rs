use crate::trace::NodeId;

use super::{Action, Encounter, Message, Protocol, Router};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProphetParams {
    pub p_init: f64,
    /// Aging factor per `time_unit`.
    pub gamma: f64,
    /// Transitivity scaling.
    pub beta: f64,
    /// Seconds per aging step.
    pub time_unit: f64,
}

impl Default for ProphetParams {
    fn default() -> Self {
        ProphetParams { p_init: 0.75, gamma: 0.98, beta: 0.25, time_unit: 30.0 }
    }
}

/// Delivery predictabilities with direct update, aging and transitivity.
#[derive(Debug, Clone)]
pub struct ProphetRouter {
    params: ProphetParams,
    n: usize,
    p: Vec<f64>,
    last_aged: Vec<f64>,
}

impl ProphetRouter {
    pub fn new(n: usize, params: ProphetParams) -> Self {
        ProphetRouter { params, n, p: vec![0.0; n * n], last_aged: vec![0.0; n] }
    }

    /// P(a, b) as last updated, without aging to the present.
    pub fn predictability(&self, a: NodeId, b: NodeId) -> f64 {
        self.p[a * self.n + b]
    }

    pub fn age(&mut self, a: NodeId, now: f64) {
        let dt = now - self.last_aged[a];
        if dt > 0.0 {
            let factor = self.params.gamma.powf(dt / self.params.time_unit);
            for x in &mut self.p[a * self.n..(a + 1) * self.n] {
                *x *= factor;
            }
            self.last_aged[a] = now;
        }
    }

    fn row(&self, a: NodeId) -> Vec<f64> {
        self.p[a * self.n..(a + 1) * self.n].to_vec()
    }

    fn encounter(&mut self, a: NodeId, b: NodeId) {
        let n = self.n;
        let ab = &mut self.p[a * n + b];
        *ab += (1.0 - *ab) * self.params.p_init;
    }

    fn transitive(&mut self, a: NodeId, b: NodeId, b_row: &[f64]) {
        let n = self.n;
        let ab = self.p[a * n + b];
        for c in (0..n).filter(|&c| c != a && c != b) {
            let via = ab * b_row[c] * self.params.beta;
            let ac = &mut self.p[a * n + c];
            if via > *ac {
                *ac = via;
            }
        }
    }
}

impl Router for ProphetRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Prophet
    }

    fn on_contact_start(&mut self, a: NodeId, b: NodeId, now: f64) {
        self.age(a, now);
        self.age(b, now);
        self.encounter(a, b);
        self.encounter(b, a);
        let (row_a, row_b) = (self.row(a), self.row(b));
        self.transitive(a, b, &row_b);
        self.transitive(b, a, &row_a);
    }

    fn decide(&self, enc: &Encounter<'_>, m: &Message, peer_has: bool) -> Action {
        if !peer_has && self.predictability(enc.peer.id, m.dst) > self.predictability(enc.carrier.id, m.dst) {
            Action::Copy
        } else {
            Action::Keep
        }
    }
}
