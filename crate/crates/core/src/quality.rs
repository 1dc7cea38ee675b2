//! CPM and modularity in a single form, with exact incremental deltas.
//!
//! Both quality functions are evaluated as
//! `sum_C [E(C, C) - g * ||C|| (||C|| - 1) / 2]`. For modularity, node sizes
//! on the base graph are degrees and `g = resolution / 2m` with `m` frozen at
//! the base graph, so the same configuration stays valid on aggregate graphs
//! and on induced subgraphs of the base graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::partition::{Partition, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityKind {
    Cpm,
    Modularity,
}

/// Quality function selector with its resolution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QualityConfig {
    kind: QualityKind,
    gamma: f64,
    /// Twice the total edge weight of the base graph.
    two_m: f64,
}

impl QualityConfig {
    pub fn cpm(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(QualityConfig { kind: QualityKind::Cpm, gamma, two_m: 0.0 })
    }

    /// Modularity normalized by the total weight of `base`.
    pub fn modularity(gamma: f64, base: &Graph) -> Result<Self> {
        check_gamma(gamma)?;
        let two_m = 2.0 * base.total_edge_weight();
        if two_m <= 0.0 || two_m.is_nan() {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(QualityConfig { kind: QualityKind::Modularity, gamma, two_m })
    }

    pub fn kind(&self) -> QualityKind {
        self.kind
    }

    /// Resolution as given by the user.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `2m` of the base graph for modularity, zero for CPM.
    pub fn two_m(&self) -> f64 {
        self.two_m
    }

    /// Resolution applied to node sizes: `gamma` for CPM, `gamma / 2m` for
    /// modularity.
    #[inline]
    pub fn resolution(&self) -> f64 {
        match self.kind {
            QualityKind::Cpm => self.gamma,
            QualityKind::Modularity => self.gamma / self.two_m,
        }
    }

    /// Prepares a base graph for optimization: unchanged for CPM, node sizes
    /// replaced by degrees for modularity.
    pub fn prepare(&self, base: &Graph) -> Result<Graph> {
        match self.kind {
            QualityKind::Cpm => Ok(base.clone()),
            QualityKind::Modularity => base.clone().with_node_sizes(base.degrees()),
        }
    }

    /// `g * a * b`, the expected-weight penalty between sets of sizes a and b.
    #[inline]
    pub(crate) fn penalty(&self, a: f64, b: f64) -> f64 {
        self.resolution() * a * b
    }

    /// `g * binom(size, 2)` extended to real sizes.
    #[inline]
    pub(crate) fn pair_penalty(&self, size: f64) -> f64 {
        self.resolution() * size * (size - 1.0) / 2.0
    }

    /// Newman modularity `Q` for a unified-form value `h`; `None` for CPM.
    pub fn standard_modularity(&self, h: f64) -> Option<f64> {
        match self.kind {
            QualityKind::Cpm => None,
            QualityKind::Modularity => Some((h - self.gamma / 2.0) / (self.two_m / 2.0)),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidResolution(gamma))
    }
}

fn check_partition(g: &Graph, p: &Partition) -> Result<()> {
    if g.node_count() == p.node_count() {
        Ok(())
    } else {
        Err(Error::PartitionSize { expected: g.node_count(), found: p.node_count() })
    }
}

/// Quality of `p` in the unified form.
pub fn quality(g: &Graph, p: &Partition, q: &QualityConfig) -> Result<f64> {
    check_partition(g, p)?;
    Ok(p.communities().map(|c| p.internal_weight(c) - q.pair_penalty(p.size_sum(c))).sum())
}

/// Quality of `p` computed from the edge list alone, ignoring every cached
/// aggregate. Used as an oracle for the incremental paths.
pub fn quality_from_scratch(g: &Graph, p: &Partition, q: &QualityConfig) -> Result<f64> {
    check_partition(g, p)?;
    let labels = p.canonical_form();
    let k = labels.community_count();
    let labels = labels.as_slice();
    let mut internal = vec![0.0; k];
    let mut size = vec![0.0; k];
    for (u, v, w) in g.edges() {
        if labels[u] == labels[v] {
            internal[labels[u]] += w;
        }
    }
    for v in 0..g.node_count() {
        size[labels[v]] += g.node_size(v);
    }
    Ok((0..k).map(|c| internal[c] - q.pair_penalty(size[c])).sum())
}

/// Change in quality when `v` moves to `target`.
///
/// `[E(v, T) - g |v| |T|] - [E(v, C_v - v) - g |v| (|C_v| - |v|)]`, where the
/// self-loop of `v` travels with it and cancels.
pub fn delta_move_node(g: &Graph, p: &Partition, q: &QualityConfig, v: usize, target: Target) -> Result<f64> {
    check_partition(g, p)?;
    p.check_node(v)?;
    let current = p.community_of(v);
    let target = match p.resolve(target)? {
        Some(c) if c == current => return Ok(0.0),
        other => other,
    };
    let mut to_current = 0.0;
    let mut to_target = 0.0;
    for (u, w) in g.neighbors(v) {
        let c = p.community_of(u);
        if c == current {
            to_current += w;
        } else if Some(c) == target {
            to_target += w;
        }
    }
    let size = g.node_size(v);
    let target_size = target.map_or(0.0, |c| p.size_sum(c));
    let gain = to_target - q.penalty(size, target_size);
    let loss = to_current - q.penalty(size, p.size_sum(current) - size);
    Ok(gain - loss)
}

/// Change in quality when the set `s`, which must lie inside one community,
/// moves to `target`.
pub fn delta_move_set(g: &Graph, p: &Partition, q: &QualityConfig, s: &NodeSet, target: Target) -> Result<f64> {
    check_partition(g, p)?;
    let first = s.iter().next().ok_or(Error::EmptyNodeSet)?;
    p.check_node(*s.as_slice().last().unwrap())?;
    let current = p.community_of(first);
    if s.iter().any(|v| p.community_of(v) != current) {
        return Err(Error::SetSpansCommunities);
    }
    let target = match p.resolve(target)? {
        Some(c) if c == current => return Ok(0.0),
        other => other,
    };
    let mut to_rest = 0.0;
    let mut to_target = 0.0;
    let mut size = 0.0;
    for v in s.iter() {
        size += g.node_size(v);
        for (u, w) in g.neighbors(v) {
            let c = p.community_of(u);
            if c == current {
                if !s.contains(u) {
                    to_rest += w;
                }
            } else if Some(c) == target {
                to_target += w;
            }
        }
    }
    let target_size = target.map_or(0.0, |c| p.size_sum(c));
    let gain = to_target - q.penalty(size, target_size);
    let loss = to_rest - q.penalty(size, p.size_sum(current) - size);
    Ok(gain - loss)
}

/// Per-community terms `E(C, C) - g binom(||C||, 2)`, indexed by community id.
pub fn community_terms(g: &Graph, p: &Partition, q: &QualityConfig) -> Result<Vec<f64>> {
    check_partition(g, p)?;
    Ok((0..p.node_count())
        .map(|c| if p.member_count(c) > 0 { p.internal_weight(c) - q.pair_penalty(p.size_sum(c)) } else { 0.0 })
        .collect())
}
