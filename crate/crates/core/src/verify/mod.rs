//! Checkers for the guarantees of the Leiden algorithm: gamma-separation,
//! gamma-connectivity, subpartition gamma-density, node optimality, uniform
//! gamma-density and subset optimality, plus the additive optimality bound
//! of uniformly gamma-dense partitions.
//!
//! Set-valued properties are decided exactly by enumerating subsets of a
//! community when it has at most [`VerifyConfig::exact_limit`] members. Larger
//! communities get a merge-tree certificate or a sampled search for
//! violations, and every verdict carries the [`Method`] that produced it.

mod brute;
mod subsets;

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::leiden::{leiden_iteration_with, LeidenConfig};
use crate::partition::Partition;
use crate::quality::{quality, QualityConfig, QualityKind};

pub use brute::{
    brute_force_optimal, find_nondecreasing_build_sequence, greedy_reachable_partitions, BuildSequence,
    GreedyReachability, DEFAULT_BRUTE_FORCE_LIMIT,
};

pub const DEFAULT_EXACT_LIMIT: usize = 14;
/// Largest community the exact checks accept regardless of configuration.
pub const MAX_EXACT_LIMIT: usize = 20;

const TOLERANCE: f64 = 1e-9;

/// `gain <= cost` up to a relative tolerance.
#[inline]
pub(crate) fn not_above(gain: f64, cost: f64) -> bool {
    gain - cost <= TOLERANCE * (1.0 + gain.abs() + cost.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Communities up to this many members are checked exactly.
    pub exact_limit: usize,
    /// Random subsets drawn per large community.
    pub samples: usize,
    pub seed: u64,
    /// When false only the per-iteration properties and node optimality are
    /// checked.
    pub full: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { exact_limit: DEFAULT_EXACT_LIMIT, samples: 10 << 10, seed: 0, full: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    /// A constructive witness was found (a merge tree).
    Certificate,
    /// Randomized search; a failure is definitive, a pass is not.
    Sampled,
    SkippedTooLarge,
    NotRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: Option<bool>,
    pub method: Method,
}

impl Verdict {
    pub(crate) fn exact(holds: bool) -> Self {
        Verdict { holds: Some(holds), method: Method::Exact }
    }

    pub(crate) fn unknown(method: Method) -> Self {
        Verdict { holds: None, method }
    }

    /// Whether the verdict is proven rather than merely unrefuted.
    pub fn is_definitive(&self) -> bool {
        match self.method {
            Method::Exact | Method::Certificate => self.holds.is_some(),
            Method::Sampled => self.holds == Some(false),
            Method::SkippedTooLarge | Method::NotRun => false,
        }
    }

    fn definitely(&self, value: bool) -> bool {
        self.is_definitive() && self.holds == Some(value)
    }
}

/// Verdicts for one community, identified by its canonical index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub community: usize,
    pub members: usize,
    pub connected: bool,
    pub gamma_separated: bool,
    pub node_optimal: bool,
    pub gamma_connected: Verdict,
    pub subpartition_dense: Verdict,
    pub uniformly_dense: Verdict,
    pub subset_optimal: Verdict,
}

impl CommunityReport {
    /// Checks subset optimal => uniformly dense => subpartition dense =>
    /// gamma-connected => connected, and subset optimal => node optimal and
    /// gamma-separated, over definitive verdicts.
    pub fn implications_hold(&self) -> bool {
        let connected = Verdict::exact(self.connected);
        let chain = [self.subset_optimal, self.uniformly_dense, self.subpartition_dense, self.gamma_connected, connected];
        for (i, stronger) in chain.iter().enumerate() {
            if stronger.definitely(true) && chain[i + 1..].iter().any(|weaker| weaker.definitely(false)) {
                return false;
            }
        }
        !(self.subset_optimal.definitely(true) && !(self.node_optimal && self.gamma_separated))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteeReport {
    pub communities: Vec<CommunityReport>,
    pub connected: bool,
    pub gamma_separated: bool,
    pub node_optimal: bool,
    pub gamma_connected: Option<bool>,
    pub subpartition_dense: Option<bool>,
    pub uniformly_dense: Option<bool>,
    pub subset_optimal: Option<bool>,
    pub bound: GapBound,
}

impl GuaranteeReport {
    pub fn implications_hold(&self) -> bool {
        self.communities.iter().all(CommunityReport::implications_hold)
    }
}

fn conjunction(verdicts: impl Iterator<Item = Verdict>) -> Option<bool> {
    let mut all = Some(true);
    for v in verdicts {
        match v.holds {
            Some(false) => return Some(false),
            Some(true) => {}
            None => all = None,
        }
    }
    all
}

/// Runs every check on every community of `p`.
pub fn audit(g: &Graph, p: &Partition, q: &QualityConfig, cfg: &VerifyConfig) -> Result<GuaranteeReport> {
    check_sizes(g, p)?;
    let sets = canonical_sets(p);
    let labels = p.canonical_form();
    let labels = labels.as_slice();
    let separated = separation_by_community(g, labels, &sets, q);
    let node_opt = node_optimality_by_community(g, p, q);
    let mut rng = crate::seeded_rng(cfg.seed);
    let mut communities = Vec::with_capacity(sets.len());
    for (c, set) in sets.iter().enumerate() {
        let connected = is_connected(g, set);
        let (gamma_connected, subpartition_dense) = subsets::connectivity_and_density(g, set, q, connected, cfg)?;
        let (uniformly_dense, subset_optimal) = if cfg.full {
            (
                subsets::uniform_density(g, set, q, connected, cfg, &mut rng)?,
                subsets::subset_optimality(g, set, labels, &sets, q, cfg, &mut rng)?,
            )
        } else {
            (Verdict::unknown(Method::NotRun), Verdict::unknown(Method::NotRun))
        };
        communities.push(CommunityReport {
            community: c,
            members: set.len(),
            connected,
            gamma_separated: separated[c],
            node_optimal: node_opt[p.community_of(set.as_slice()[0])],
            gamma_connected,
            subpartition_dense,
            uniformly_dense,
            subset_optimal,
        });
    }
    let uniformly_dense = conjunction(communities.iter().map(|r| r.uniformly_dense));
    let bound = gap_bound(g, p, q, uniformly_dense)?;
    Ok(GuaranteeReport {
        connected: communities.iter().all(|r| r.connected),
        gamma_separated: communities.iter().all(|r| r.gamma_separated),
        node_optimal: communities.iter().all(|r| r.node_optimal),
        gamma_connected: conjunction(communities.iter().map(|r| r.gamma_connected)),
        subpartition_dense: conjunction(communities.iter().map(|r| r.subpartition_dense)),
        uniformly_dense,
        subset_optimal: conjunction(communities.iter().map(|r| r.subset_optimal)),
        communities,
        bound,
    })
}

fn check_sizes(g: &Graph, p: &Partition) -> Result<()> {
    if g.node_count() == p.node_count() {
        Ok(())
    } else {
        Err(Error::PartitionSize { expected: g.node_count(), found: p.node_count() })
    }
}

/// Communities as node sets, indexed by canonical label.
fn canonical_sets(p: &Partition) -> Vec<NodeSet> {
    let labels = p.canonical_form();
    let mut sets = vec![Vec::new(); labels.community_count()];
    for (v, &c) in labels.as_slice().iter().enumerate() {
        sets[c].push(v);
    }
    sets.into_iter().map(NodeSet::new).collect()
}

fn is_connected(g: &Graph, set: &NodeSet) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let mut seen = vec![false; set.len()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = stack.pop() {
        for (u, w) in g.neighbors(set.as_slice()[i]) {
            if w <= 0.0 {
                continue;
            }
            if let Some(j) = set.index_of(u) {
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
    }
    reached == set.len()
}

/// A pair of communities whose merger would improve quality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationViolation {
    pub first: usize,
    pub second: usize,
    pub delta: f64,
}

/// Pairs of communities (canonical labels) that are not gamma-separated.
/// Pairs without edges between them are separated analytically.
pub fn check_gamma_separation(g: &Graph, p: &Partition, q: &QualityConfig) -> Result<Vec<SeparationViolation>> {
    check_sizes(g, p)?;
    let sets = canonical_sets(p);
    let labels = p.canonical_form();
    Ok(separation_violations(g, labels.as_slice(), &sets, q))
}

fn separation_violations(g: &Graph, labels: &[usize], sets: &[NodeSet], q: &QualityConfig) -> Vec<SeparationViolation> {
    let k = sets.len();
    let size: Vec<f64> = sets.iter().map(|s| s.iter().map(|v| g.node_size(v)).sum()).collect();
    let mut between = alloc::collections::BTreeMap::new();
    for (u, v, w) in g.edges() {
        let (a, b) = (labels[u], labels[v]);
        if a != b {
            *between.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
    }
    let mut out = Vec::new();
    for ((a, b), w) in between {
        let cost = q.penalty(size[a], size[b]);
        if !not_above(w, cost) {
            out.push(SeparationViolation { first: a, second: b, delta: w - cost });
        }
    }
    debug_assert!(out.iter().all(|v| v.first < k && v.second < k));
    out
}

fn separation_by_community(g: &Graph, labels: &[usize], sets: &[NodeSet], q: &QualityConfig) -> Vec<bool> {
    let mut ok = vec![true; sets.len()];
    for v in separation_violations(g, labels, sets, q) {
        ok[v.first] = false;
        ok[v.second] = false;
    }
    ok
}

/// Whether no single node can improve quality by moving to another
/// community or to an empty one.
pub fn check_node_optimality(g: &Graph, p: &Partition, q: &QualityConfig) -> Result<bool> {
    check_sizes(g, p)?;
    Ok(node_optimality_by_community(g, p, q).iter().all(|&ok| ok))
}

/// Node optimality per community id of `p`.
fn node_optimality_by_community(g: &Graph, p: &Partition, q: &QualityConfig) -> Vec<bool> {
    let mut ok = vec![true; p.node_count()];
    let mut scratch = crate::moves::NeighborWeights::new(g.node_count());
    for v in 0..g.node_count() {
        scratch.collect(g, p, v, |_| true);
        let own = p.community_of(v);
        let size = g.node_size(v);
        let stay = scratch.weight(own) - q.penalty(size, p.size_sum(own) - size);
        let mut optimal = p.member_count(own) == 1 || not_above(0.0, stay);
        for &c in scratch.touched() {
            if c != own && !not_above(scratch.weight(c) - q.penalty(size, p.size_sum(c)), stay) {
                optimal = false;
            }
        }
        if !optimal {
            ok[own] = false;
        }
    }
    scratch.clear();
    ok
}

/// Gamma-connectivity of a single set of nodes, exact up to the limit.
pub fn check_gamma_connectivity(g: &Graph, c: &NodeSet, q: &QualityConfig, cfg: &VerifyConfig) -> Result<Verdict> {
    check_set(g, c)?;
    Ok(subsets::connectivity_and_density(g, c, q, is_connected(g, c), cfg)?.0)
}

/// Subpartition gamma-density of a community.
pub fn check_subpartition_gamma_density(g: &Graph, c: &NodeSet, q: &QualityConfig, cfg: &VerifyConfig) -> Result<Verdict> {
    check_set(g, c)?;
    Ok(subsets::connectivity_and_density(g, c, q, is_connected(g, c), cfg)?.1)
}

/// Uniform gamma-density of a community.
pub fn check_uniform_gamma_density(g: &Graph, c: &NodeSet, q: &QualityConfig, cfg: &VerifyConfig) -> Result<Verdict> {
    check_set(g, c)?;
    let mut rng = crate::seeded_rng(cfg.seed);
    subsets::uniform_density(g, c, q, is_connected(g, c), cfg, &mut rng)
}

/// Subset optimality of the whole partition.
pub fn check_subset_optimality(g: &Graph, p: &Partition, q: &QualityConfig, cfg: &VerifyConfig) -> Result<Verdict> {
    check_sizes(g, p)?;
    let sets = canonical_sets(p);
    let labels = p.canonical_form();
    let mut rng = crate::seeded_rng(cfg.seed);
    let mut verdicts = Vec::with_capacity(sets.len());
    for set in &sets {
        let v = subsets::subset_optimality(g, set, labels.as_slice(), &sets, q, cfg, &mut rng)?;
        if v.holds == Some(false) {
            return Ok(v);
        }
        verdicts.push(v);
    }
    let method = if verdicts.iter().all(|v| v.method == Method::Exact) {
        Method::Exact
    } else if verdicts.iter().any(|v| v.method == Method::SkippedTooLarge) {
        Method::SkippedTooLarge
    } else {
        Method::Sampled
    };
    Ok(Verdict { holds: conjunction(verdicts.into_iter()), method })
}

fn check_set(g: &Graph, c: &NodeSet) -> Result<()> {
    if c.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    match c.as_slice().last() {
        Some(&v) if v >= g.node_count() => Err(Error::NodeOutOfRange { node: v, node_count: g.node_count() }),
        _ => Ok(()),
    }
}

/// Additive bound on how far the quality of a uniformly gamma-dense partition
/// can lie below the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBound {
    /// Whether the partition is uniformly dense and the graph satisfies the
    /// bound's weight assumptions.
    pub applicable: bool,
    pub uniformly_dense: Option<bool>,
    /// Maximum edge weight for CPM, 1 for modularity.
    pub weight_scale: f64,
    /// `1 - g / weight_scale`.
    pub factor: f64,
    /// Total weight of edges between distinct communities.
    pub external_weight: f64,
    /// `factor * external_weight`, evaluated as `X - g X / weight_scale`.
    pub bound: f64,
    /// The same factor applied to the sum over all ordered pairs of
    /// communities, diagonal included: `external_weight + sum_C E(C, C) / 2`.
    pub bound_all_pairs: f64,
    pub quality: f64,
    /// `quality + bound`, an upper bound on the optimal quality.
    pub optimum_upper: f64,
    /// `factor * m - g * sum_C [binom(||C||, 2) - E(C, C) / weight_scale]`,
    /// equal to `optimum_upper`.
    pub missing_link_form: f64,
}

/// Gap bound for `p`, checking uniform gamma-density first.
pub fn optimality_gap_bound(g: &Graph, p: &Partition, q: &QualityConfig, cfg: &VerifyConfig) -> Result<GapBound> {
    check_sizes(g, p)?;
    let mut rng = crate::seeded_rng(cfg.seed);
    let verdicts: Result<Vec<Verdict>> = canonical_sets(p)
        .iter()
        .map(|set| subsets::uniform_density(g, set, q, is_connected(g, set), cfg, &mut rng))
        .collect();
    gap_bound(g, p, q, conjunction(verdicts?.into_iter()))
}

fn gap_bound(g: &Graph, p: &Partition, q: &QualityConfig, uniformly_dense: Option<bool>) -> Result<GapBound> {
    let h = quality(g, p, q)?;
    let internal: f64 = p.communities().map(|c| p.internal_weight(c)).sum();
    let m = g.total_edge_weight();
    let external = m - internal;
    let g_res = q.resolution();
    let (weight_scale, assumptions) = match q.kind() {
        QualityKind::Cpm => {
            let w = g.max_edge_weight();
            let scale = if w > 0.0 { w } else { 1.0 };
            (scale, g.node_sizes().iter().all(|&s| s >= 1.0))
        }
        QualityKind::Modularity => (1.0, g.edges().all(|(_, _, w)| w >= 1.0)),
    };
    let factor = 1.0 - g_res / weight_scale;
    let bound = external - g_res * external / weight_scale;
    let missing: f64 = p
        .communities()
        .map(|c| {
            let s = p.size_sum(c);
            s * (s - 1.0) / 2.0 - p.internal_weight(c) / weight_scale
        })
        .sum();
    Ok(GapBound {
        applicable: uniformly_dense == Some(true) && assumptions,
        uniformly_dense,
        weight_scale,
        factor,
        external_weight: external,
        bound,
        bound_all_pairs: factor * (external + internal / 2.0),
        quality: h,
        optimum_upper: h + bound,
        missing_link_form: factor * m - g_res * missing,
    })
}

/// Verdict of the badly-connected test for one community.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunityConnectivity {
    pub community: usize,
    pub members: usize,
    pub connected: bool,
    pub badly_connected: bool,
    /// Parts Leiden found on the community's induced subgraph.
    pub parts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivitySummary {
    pub communities: Vec<CommunityConnectivity>,
    pub disconnected: usize,
    pub badly_connected: usize,
    pub percent_disconnected: f64,
    pub percent_badly_connected: f64,
}

/// Iterations of Leiden on an induced subgraph before giving up on reaching
/// a stable iteration.
const SUBGRAPH_ITERATIONS: usize = 20;

/// Runs Leiden on the induced subgraph of every community, keeping the base
/// graph's normalization, and counts a community as badly connected when it
/// is disconnected or Leiden splits it. Communities that are not split may
/// still be badly connected, so the count is a lower bound.
pub fn detect_badly_connected(g: &Graph, p: &Partition, leiden: &LeidenConfig) -> Result<ConnectivitySummary> {
    check_sizes(g, p)?;
    let sets = canonical_sets(p);
    let mut rng = crate::seeded_rng(leiden.seed);
    let mut communities = Vec::with_capacity(sets.len());
    for (c, set) in sets.iter().enumerate() {
        let connected = is_connected(g, set);
        let parts = if set.len() == 1 {
            1
        } else {
            let (sub, _) = g.induced_subgraph(set)?;
            let mut current = Partition::singleton(&sub);
            for _ in 0..SUBGRAPH_ITERATIONS {
                let next = leiden_iteration_with(&sub, &current, leiden, &mut rng)?.partition;
                let stable = next == current;
                current = next;
                if stable {
                    break;
                }
            }
            current.community_count()
        };
        communities.push(CommunityConnectivity {
            community: c,
            members: set.len(),
            connected,
            badly_connected: !connected || parts > 1,
            parts,
        });
    }
    let total = communities.len().max(1) as f64;
    let disconnected = communities.iter().filter(|c| !c.connected).count();
    let badly_connected = communities.iter().filter(|c| c.badly_connected).count();
    Ok(ConnectivitySummary {
        percent_disconnected: 100.0 * disconnected as f64 / total,
        percent_badly_connected: 100.0 * badly_connected as f64 / total,
        disconnected,
        badly_connected,
        communities,
    })
}
