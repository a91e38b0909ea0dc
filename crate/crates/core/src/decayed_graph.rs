//! Decayed aggregation graph views.
//!
//! Every tie strength is the exponentially decayed sum of past contact
//! durations, `w(T) = Σ (off_i - on_i) · exp(-β (T - off_i))`. Instead of
//! keeping the contact series, each cell stores one `(value, last_update)`
//! pair and decays lazily on read, which is exact for any read time and
//! needs constant storage per pair.
//!
//! A [`DecayedGraphView`] is one node's local copy of the whole matrix. The
//! owner's row is authoritative; other rows arrive by gossip and carry the
//! time they were last refreshed.

use std::fmt::Write as _;

use thiserror::Error;

use crate::spectral::Matrix;
use crate::trace::{ContactTrace, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("node {0} cannot record a contact with itself")]
    SelfContact(NodeId),
    #[error("contact interval ({on}, {off}) is empty")]
    EmptyInterval { on: f64, off: f64 },
    #[error("time regression: {requested} is before last update {last_update}")]
    TimeRegression { requested: f64, last_update: f64 },
    #[error("node {node} out of range for a view of {n} nodes")]
    UnknownNode { node: NodeId, n: usize },
    #[error("views have different sizes ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("invalid decay parameters: {0}")]
    InvalidParams(String),
}

/// Exponential decay rate and slot length, both in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    /// Decay rate per second.
    pub beta: f64,
    /// Discretization unit used by the per-slot recursion.
    pub slot: f64,
}

impl DecayParams {
    /// `beta` expressed per `time_unit` seconds; the slot is one time unit.
    pub fn per_time_unit(beta: f64, time_unit: f64) -> Result<Self, GraphError> {
        let p = DecayParams { beta: beta / time_unit, slot: time_unit };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(GraphError::InvalidParams(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.slot > 0.0 && self.slot.is_finite()) {
            return Err(GraphError::InvalidParams(format!("slot must be positive, got {}", self.slot)));
        }
        Ok(())
    }
}

impl Default for DecayParams {
    /// β = 1 per hour of trace time.
    fn default() -> Self {
        DecayParams { beta: 1.0 / 3600.0, slot: 3600.0 }
    }
}

/// One lazily decayed accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayedWeight {
    value: f64,
    last_update: f64,
}

impl Default for DecayedWeight {
    fn default() -> Self {
        DecayedWeight { value: 0.0, last_update: f64::NEG_INFINITY }
    }
}

impl DecayedWeight {
    pub fn last_update(&self) -> f64 {
        self.last_update
    }

    /// Stored value at its last update instant.
    pub fn raw_value(&self) -> f64 {
        self.value
    }

    pub fn read(&self, t: f64, beta: f64) -> Result<f64, GraphError> {
        if self.value == 0.0 {
            return Ok(0.0);
        }
        if t < self.last_update {
            return Err(GraphError::TimeRegression { requested: t, last_update: self.last_update });
        }
        Ok(self.value * (-beta * (t - self.last_update)).exp())
    }

    /// Decays to `off`, then adds the finished contact's duration.
    pub fn add_contact(&mut self, on: f64, off: f64, beta: f64) -> Result<(), GraphError> {
        if !(on < off) {
            return Err(GraphError::EmptyInterval { on, off });
        }
        if off < self.last_update {
            return Err(GraphError::TimeRegression { requested: off, last_update: self.last_update });
        }
        let decayed = self.read(off, beta)?;
        self.value = decayed + (off - on);
        self.last_update = off;
        Ok(())
    }
}

/// Literal evaluation of the decayed sum over a contact series. Kept
/// independent of [`DecayedWeight`] so it can serve as a test oracle.
pub fn brute_force_weight(series: &[(f64, f64)], t: f64, beta: f64) -> f64 {
    series.iter().map(|&(on, off)| (off - on) * (-beta * (t - off)).exp()).sum()
}

/// Per-slot recursion `w(t) = h(t) + e^{-β·slot} w(t - slot)` evaluated at
/// every slot boundary up to `t`; `h(t)` is the duration of a contact whose
/// end falls in the slot `(t - slot, t]`. Matches [`brute_force_weight`]
/// exactly when every contact ends on a slot boundary.
pub fn slot_recursive_weight(series: &[(f64, f64)], t: f64, params: DecayParams) -> f64 {
    let slots = (t / params.slot).floor() as i64;
    let factor = (-params.beta * params.slot).exp();
    let mut w = 0.0;
    for s in 0..=slots {
        let hi = s as f64 * params.slot;
        let lo = hi - params.slot;
        let h: f64 = series
            .iter()
            .filter(|&&(_, off)| off > lo && off <= hi)
            .map(|&(on, off)| off - on)
            .sum();
        w = h + factor * w;
    }
    w * (-params.beta * (t - slots as f64 * params.slot)).exp()
}

/// A node's local view of the decayed aggregation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayedGraphView {
    owner: NodeId,
    n: usize,
    beta: f64,
    cells: Vec<DecayedWeight>,
    recent_time: Vec<f64>,
}

impl DecayedGraphView {
    pub fn new(owner: NodeId, n: usize, params: DecayParams) -> Result<Self, GraphError> {
        params.validate()?;
        if owner >= n {
            return Err(GraphError::UnknownNode { node: owner, n });
        }
        Ok(DecayedGraphView {
            owner,
            n,
            beta: params.beta,
            cells: vec![DecayedWeight::default(); n * n],
            recent_time: vec![f64::NEG_INFINITY; n],
        })
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Last instant row `u` was refreshed; `-inf` if never.
    pub fn recent_time(&self, u: NodeId) -> f64 {
        self.recent_time[u]
    }

    pub fn row(&self, u: NodeId) -> &[DecayedWeight] {
        &self.cells[u * self.n..(u + 1) * self.n]
    }

    fn check(&self, node: NodeId) -> Result<(), GraphError> {
        if node >= self.n {
            Err(GraphError::UnknownNode { node, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Folds a finished contact between the owner and `peer` into the owner's
    /// row. The mirrored cell in the local copy of `peer`'s row gets the same
    /// update so the local matrix stays consistent until `peer`'s own row
    /// arrives by gossip.
    pub fn record_contact(&mut self, peer: NodeId, on: f64, off: f64) -> Result<(), GraphError> {
        self.check(peer)?;
        if peer == self.owner {
            return Err(GraphError::SelfContact(peer));
        }
        let (owner, n, beta) = (self.owner, self.n, self.beta);
        self.cells[owner * n + peer].add_contact(on, off, beta)?;
        let mirror = &mut self.cells[peer * n + owner];
        if off >= mirror.last_update {
            mirror.add_contact(on, off, beta)?;
        }
        self.recent_time[owner] = self.recent_time[owner].max(off);
        Ok(())
    }

    pub fn weight_at(&self, u: NodeId, v: NodeId, t: f64) -> Result<f64, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(0.0);
        }
        self.cells[u * self.n + v].read(t, self.beta)
    }

    /// Dense snapshot at `t`, symmetrized as `(M + Mᵀ) / 2` with a zero
    /// diagonal.
    pub fn snapshot_matrix(&self, t: f64) -> Result<Matrix, GraphError> {
        let n = self.n;
        let mut m = Matrix::zeros(n, n);
        for u in 0..n {
            for v in (u + 1)..n {
                let w = 0.5 * (self.weight_at(u, v, t)? + self.weight_at(v, u, t)?);
                m[(u, v)] = w;
                m[(v, u)] = w;
            }
        }
        Ok(m)
    }

    /// Storage cells held by the view: one per ordered pair.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }
}

/// Gossip exchange on contact: each side adopts every row for which the peer
/// holds a strictly fresher copy. A node never overwrites its own row.
pub fn exchange_views(a: &mut DecayedGraphView, b: &mut DecayedGraphView) -> Result<(), GraphError> {
    if a.n != b.n {
        return Err(GraphError::DimensionMismatch(a.n, b.n));
    }
    let n = a.n;
    for u in 0..n {
        let (ta, tb) = (a.recent_time[u], b.recent_time[u]);
        if ta < tb && u != a.owner {
            a.cells[u * n..(u + 1) * n].copy_from_slice(&b.cells[u * n..(u + 1) * n]);
            a.recent_time[u] = tb;
        } else if tb < ta && u != b.owner {
            b.cells[u * n..(u + 1) * n].copy_from_slice(&a.cells[u * n..(u + 1) * n]);
            b.recent_time[u] = ta;
        }
    }
    Ok(())
}

/// Global (omniscient) decayed graph of a trace at time `t`: every contact
/// that ended by `t` contributes to both endpoints.
pub fn aggregate_matrix(trace: &ContactTrace, t: f64, beta: f64) -> Matrix {
    let n = trace.n();
    let mut m = Matrix::zeros(n, n);
    for e in trace.events().iter().take_while(|e| e.on <= t) {
        if e.off <= t {
            let w = e.duration() * (-beta * (t - e.off)).exp();
            m[(e.node_a, e.node_b)] += w;
            m[(e.node_b, e.node_a)] += w;
        }
    }
    m
}

/// Writes a matrix as header-less CSV rows.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| m[(r, c)].to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
