//! The Leiden algorithm: queue-based local moving, randomized refinement
//! inside each community, and aggregation on the refined partition while the
//! unrefined partition seeds the next level.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Aggregate, Graph, NodeSet};
use crate::louvain::{check_start, RunOutcome, RunStats};
use crate::moves::{self, NeighborWeights};
use crate::partition::{HierarchicalPartition, HierarchyLevel, Partition};
use crate::quality::QualityConfig;

pub const DEFAULT_THETA: f64 = 0.01;

/// Refinement attempts per level before falling back to aggregating on the
/// unrefined partition.
const REFINE_ATTEMPTS: usize = 32;

#[derive(Debug, Clone)]
pub struct LeidenConfig {
    pub quality: QualityConfig,
    /// Randomness of the refinement step; merges are drawn with probability
    /// proportional to `exp(delta / theta)`.
    pub theta: f64,
    pub seed: u64,
    /// Maximum number of graphs (base plus aggregates) to optimize on.
    pub max_levels: Option<usize>,
}

impl LeidenConfig {
    pub fn new(quality: QualityConfig, seed: u64) -> Self {
        LeidenConfig { quality, theta: DEFAULT_THETA, seed, max_levels: None }
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        self.theta = theta;
        Ok(self)
    }

    /// Whether `theta` lies in the range where results are insensitive to it.
    pub fn theta_in_typical_range(&self) -> bool {
        (0.0005..=0.1).contains(&self.theta)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTheta(theta))
    }
}

/// First-in first-out queue of nodes without duplicates.
#[derive(Debug, Clone)]
pub struct VisitQueue {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl VisitQueue {
    pub fn new(n: usize) -> Self {
        VisitQueue { queue: VecDeque::with_capacity(n), queued: vec![false; n] }
    }

    /// Appends `v` unless it is already waiting. Returns whether it was added.
    pub fn push(&mut self, v: usize) -> bool {
        if self.queued[v] {
            return false;
        }
        self.queued[v] = true;
        self.queue.push_back(v);
        true
    }

    pub fn pop(&mut self) -> Option<usize> {
        let v = self.queue.pop_front()?;
        self.queued[v] = false;
        Some(v)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.queued[v]
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// One Leiden iteration started from `p0`, seeded from `cfg.seed`.
pub fn leiden_iteration(g: &Graph, p0: &Partition, cfg: &LeidenConfig) -> Result<RunOutcome> {
    let mut rng = crate::seeded_rng(cfg.seed);
    leiden_iteration_with(g, p0, cfg, &mut rng)
}

pub fn leiden_iteration_with<R: Rng + ?Sized>(
    g: &Graph,
    p0: &Partition,
    cfg: &LeidenConfig,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_start(g, p0)?;
    check_theta(cfg.theta)?;
    let mut stats = RunStats::default();
    let mut hierarchy = HierarchicalPartition::new();
    let mut graph = g.clone();
    let mut p = p0.clone();
    loop {
        fast_counted(&graph, &mut p, &cfg.quality, rng, &mut stats);
        stats.levels += 1;
        let done = p.community_count() == graph.node_count()
            || cfg.max_levels.is_some_and(|cap| stats.levels >= cap);
        if done {
            hierarchy.push(HierarchyLevel { graph, partition: p, up: Vec::new() });
            break;
        }
        let mut refined = refine_counted(&graph, &p, &cfg.quality, cfg.theta, rng, &mut stats);
        let mut attempts = 1;
        while refined.is_singleton() && attempts < REFINE_ATTEMPTS {
            refined = refine_counted(&graph, &p, &cfg.quality, cfg.theta, rng, &mut stats);
            attempts += 1;
        }
        if refined.is_singleton() {
            refined = p.clone();
        }
        let agg = graph.aggregate(&refined)?;
        let next = lift_partition(&p, &agg)?;
        hierarchy.push(HierarchyLevel { graph, partition: p, up: agg.node_map });
        graph = agg.graph;
        p = next;
    }
    let partition = hierarchy.flatten()?;
    Ok(RunOutcome { hierarchy, partition, stats })
}

/// Queue-based local moving. Every node is visited once in random order;
/// after a strictly improving move, neighbours outside the new community are
/// queued again. Returns `(visits, moves)`.
pub fn move_nodes_fast<R: Rng + ?Sized>(g: &Graph, p: &mut Partition, q: &QualityConfig, rng: &mut R) -> Result<(u64, u64)> {
    check_start(g, p)?;
    let mut stats = RunStats::default();
    fast_counted(g, p, q, rng, &mut stats);
    Ok((stats.visits, stats.moves))
}

fn fast_counted<R: Rng + ?Sized>(g: &Graph, p: &mut Partition, q: &QualityConfig, rng: &mut R, stats: &mut RunStats) {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut queue = VisitQueue::new(n);
    for v in order {
        queue.push(v);
    }
    let mut scratch = NeighborWeights::new(n);
    while let Some(v) = queue.pop() {
        stats.visits += 1;
        let mv = moves::best_move(g, p, q, v, &mut scratch);
        if mv.delta > 0.0 {
            let new = moves::apply(g, p, v, &mv);
            stats.moves += 1;
            for (u, _) in g.neighbors(v) {
                if p.community_of(u) != new {
                    queue.push(u);
                }
            }
        }
    }
}

/// Refinement of `p`: starting from singletons, nodes are merged only with
/// nodes of their own community of `p`.
pub fn refine_partition<R: Rng + ?Sized>(g: &Graph, p: &Partition, q: &QualityConfig, theta: f64, rng: &mut R) -> Result<Partition> {
    check_start(g, p)?;
    check_theta(theta)?;
    let mut stats = RunStats::default();
    Ok(refine_counted(g, p, q, theta, rng, &mut stats))
}

fn refine_counted<R: Rng + ?Sized>(
    g: &Graph,
    p: &Partition,
    q: &QualityConfig,
    theta: f64,
    rng: &mut R,
    stats: &mut RunStats,
) -> Partition {
    let mut refined = Partition::singleton(g);
    let mut work = MergeWork::new(g.node_count());
    for members in p.members_by_id() {
        if members.len() > 1 {
            let c = p.community_of(members[0]);
            work.merge(g, &mut refined, &members, |u| p.community_of(u) == c, q, theta, rng, stats);
        }
    }
    refined
}

/// Merges nodes of `s` within `refined`, whose communities must each lie
/// inside or outside `s`. Only nodes well connected to `s` move, only from a
/// singleton, and only into communities well connected to `s`. Returns the
/// number of nodes considered.
pub fn merge_nodes_subset<R: Rng + ?Sized>(
    g: &Graph,
    refined: &mut Partition,
    s: &NodeSet,
    q: &QualityConfig,
    theta: f64,
    rng: &mut R,
) -> Result<u64> {
    check_start(g, refined)?;
    check_theta(theta)?;
    if s.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let n = g.node_count();
    let mut mask = vec![false; n];
    for v in s.iter() {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, node_count: n });
        }
        mask[v] = true;
    }
    let mut stats = RunStats::default();
    let mut work = MergeWork::new(n);
    work.merge(g, refined, s.as_slice(), |u| mask[u], q, theta, rng, &mut stats);
    Ok(stats.refine_visits)
}

struct MergeWork {
    scratch: NeighborWeights,
    /// Weight from each refined community to the rest of the subset.
    external: Vec<f64>,
    candidates: Vec<(usize, f64, f64)>,
}

impl MergeWork {
    fn new(n: usize) -> Self {
        MergeWork { scratch: NeighborWeights::new(n), external: vec![0.0; n], candidates: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    fn merge<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        refined: &mut Partition,
        members: &[usize],
        in_s: impl Fn(usize) -> bool,
        q: &QualityConfig,
        theta: f64,
        rng: &mut R,
        stats: &mut RunStats,
    ) {
        let total: f64 = members.iter().map(|&v| g.node_size(v)).sum();
        let mut well_connected = Vec::new();
        for &v in members {
            let mut to_rest = 0.0;
            let own = refined.community_of(v);
            for (u, w) in g.neighbors(v) {
                if in_s(u) {
                    to_rest += w;
                    if refined.community_of(u) != own {
                        self.external[own] += w;
                    }
                }
            }
            let size = g.node_size(v);
            if to_rest >= q.penalty(size, total - size) {
                well_connected.push(v);
            }
        }
        well_connected.shuffle(rng);
        for v in well_connected {
            let own = refined.community_of(v);
            if refined.member_count(own) != 1 {
                continue;
            }
            stats.refine_visits += 1;
            self.scratch.collect(g, refined, v, &in_s);
            let size = g.node_size(v);
            self.candidates.clear();
            self.candidates.push((own, 0.0, 0.0));
            for &c in self.scratch.touched() {
                if c == own {
                    continue;
                }
                let c_size = refined.size_sum(c);
                if self.external[c] < q.penalty(c_size, total - c_size) {
                    continue;
                }
                let w = self.scratch.weight(c);
                let delta = w - q.penalty(size, c_size);
                if delta >= 0.0 {
                    self.candidates.push((c, delta, w));
                }
            }
            let (target, _, w) = sample(&self.candidates, theta, rng);
            if target != own {
                self.external[target] += self.external[own] - 2.0 * w;
                self.external[own] = 0.0;
                refined.relocate(g, v, own, target, 0.0, w);
                stats.moves += 1;
            }
        }
        for &v in members {
            self.external[refined.community_of(v)] = 0.0;
        }
        self.scratch.clear();
    }
}

/// Draws a candidate with probability proportional to `exp(delta / theta)`.
fn sample<R: Rng + ?Sized>(candidates: &[(usize, f64, f64)], theta: f64, rng: &mut R) -> (usize, f64, f64) {
    if candidates.len() == 1 {
        return candidates[0];
    }
    let top = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = candidates.iter().map(|c| libm::exp((c.1 - top) / theta)).sum();
    let mut r = rng.gen::<f64>() * total;
    for &c in candidates {
        r -= libm::exp((c.1 - top) / theta);
        if r < 0.0 {
            return c;
        }
    }
    *candidates.iter().rev().find(|c| c.1 == top).unwrap()
}

/// Partition of the aggregate graph that puts every aggregate node in the
/// community of `p` containing its members.
pub fn lift_partition(p: &Partition, agg: &Aggregate) -> Result<Partition> {
    if agg.node_map.len() != p.node_count() {
        return Err(Error::PartitionSize { expected: agg.node_map.len(), found: p.node_count() });
    }
    let mut labels = vec![usize::MAX; agg.graph.node_count()];
    for (v, &x) in agg.node_map.iter().enumerate() {
        let c = p.community_of(v);
        if labels[x] == usize::MAX {
            labels[x] = c;
        } else if labels[x] != c {
            return Err(Error::InconsistentHierarchy("refined community straddles two communities"));
        }
    }
    Partition::from_assignment(&agg.graph, &labels)
}
