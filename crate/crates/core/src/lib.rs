//! Louvain and Leiden community detection for CPM and modularity, with
//! executable checkers for the connectivity and optimality guarantees the
//! algorithms provide.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing, the
//! command-line driver and the experiment harness live in the
//! `community-detect` crate.
//!
//! Quality is always evaluated in the unified form
//!
//! ```text
//! H(P) = sum over C in P of [ E(C, C) - g * ||C|| (||C|| - 1) / 2 ]
//! ```
//!
//! where `||C||` is the sum of node sizes. For CPM the sizes are 1 on the base
//! graph and `g` is the resolution. For modularity the sizes are base-graph
//! degrees and `g = resolution / 2m`; see [`quality::QualityConfig`].
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod benchgen;
mod error;
pub mod fixtures;
pub mod graph;
pub mod leiden;
pub mod louvain;
mod moves;
pub mod partition;
pub mod quality;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Aggregate, Graph, NodeSet};
pub use leiden::LeidenConfig;
pub use louvain::{LouvainConfig, RunOutcome, RunStats};
pub use partition::{CanonicalLabels, HierarchicalPartition, Partition, Target};
pub use quality::{QualityConfig, QualityKind};

/// Seeded generator used by every randomized routine in the crate.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
