//! Opportunistic forwarding with partial centrality.
//!
//! Contact traces feed per-node decayed contact graphs; PCA of those graphs
//! yields overlapping communities and each node's partial centrality toward
//! every community; a discrete-event engine replays traces under OFPC and
//! four baseline protocols.

// NaN must fail range checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decayed_graph;
pub mod spectral;
pub mod trace;
pub mod community;
pub mod routing;
pub mod engine;
pub mod config;
pub mod cli;
