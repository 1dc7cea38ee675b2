//! The Louvain algorithm: full-sweep local moving followed by aggregation,
//! repeated until every community is a single node.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moves::{self, NeighborWeights};
use crate::partition::{HierarchicalPartition, HierarchyLevel, Partition};
use crate::quality::QualityConfig;

#[derive(Debug, Clone)]
pub struct LouvainConfig {
    pub quality: QualityConfig,
    pub seed: u64,
    /// Maximum number of graphs (base plus aggregates) to optimize on.
    pub max_levels: Option<usize>,
    /// Explicit node orders for the sweeps on the base graph. Sweep `i` uses
    /// order `i`, the last order repeats, and aggregate levels shuffle as
    /// usual.
    pub visit_order: Option<Vec<Vec<usize>>>,
}

impl LouvainConfig {
    pub fn new(quality: QualityConfig, seed: u64) -> Self {
        LouvainConfig { quality, seed, max_levels: None, visit_order: None }
    }
}

/// Work counters of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct RunStats {
    /// Node evaluations during local moving.
    pub visits: u64,
    /// Node evaluations during refinement (always zero for Louvain).
    pub refine_visits: u64,
    pub moves: u64,
    pub levels: usize,
}

impl RunStats {
    pub fn total_visits(&self) -> u64 {
        self.visits + self.refine_visits
    }
}

/// Result of one iteration of either algorithm.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub hierarchy: HierarchicalPartition,
    /// Partition of the base graph.
    pub partition: Partition,
    pub stats: RunStats,
}

pub(crate) fn check_start(g: &Graph, p0: &Partition) -> Result<()> {
    if g.node_count() == p0.node_count() {
        Ok(())
    } else {
        Err(Error::PartitionSize { expected: g.node_count(), found: p0.node_count() })
    }
}

/// One Louvain iteration started from `p0`, seeded from `cfg.seed`.
pub fn louvain_iteration(g: &Graph, p0: &Partition, cfg: &LouvainConfig) -> Result<RunOutcome> {
    let mut rng = crate::seeded_rng(cfg.seed);
    louvain_iteration_with(g, p0, cfg, &mut rng)
}

pub fn louvain_iteration_with<R: Rng + ?Sized>(
    g: &Graph,
    p0: &Partition,
    cfg: &LouvainConfig,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_start(g, p0)?;
    if let Some(orders) = &cfg.visit_order {
        for order in orders {
            let mut seen = alloc::vec![false; g.node_count()];
            for &v in order {
                if v >= g.node_count() || core::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidVisitOrder(v));
                }
            }
        }
    }
    let mut stats = RunStats::default();
    let mut hierarchy = HierarchicalPartition::new();
    let mut graph = g.clone();
    let mut p = p0.clone();
    loop {
        let orders = if stats.levels == 0 { cfg.visit_order.as_deref() } else { None };
        move_nodes_counted(&graph, &mut p, &cfg.quality, orders, rng, &mut stats);
        stats.levels += 1;
        let done = p.community_count() == graph.node_count()
            || cfg.max_levels.is_some_and(|cap| stats.levels >= cap);
        if done {
            hierarchy.push(HierarchyLevel { graph, partition: p, up: Vec::new() });
            break;
        }
        let agg = graph.aggregate(&p)?;
        let next = Partition::singleton(&agg.graph);
        hierarchy.push(HierarchyLevel { graph, partition: p, up: agg.node_map });
        graph = agg.graph;
        p = next;
    }
    let partition = hierarchy.flatten()?;
    Ok(RunOutcome { hierarchy, partition, stats })
}

/// Local moving until a full sweep moves no node. Returns the number of
/// node evaluations.
pub fn move_nodes<R: Rng + ?Sized>(g: &Graph, p: &mut Partition, q: &QualityConfig, rng: &mut R) -> Result<u64> {
    check_start(g, p)?;
    let mut stats = RunStats::default();
    move_nodes_counted(g, p, q, None, rng, &mut stats);
    Ok(stats.visits)
}

fn move_nodes_counted<R: Rng + ?Sized>(
    g: &Graph,
    p: &mut Partition,
    q: &QualityConfig,
    orders: Option<&[Vec<usize>]>,
    rng: &mut R,
    stats: &mut RunStats,
) {
    let n = g.node_count();
    let mut scratch = NeighborWeights::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut sweep = 0;
    loop {
        match orders {
            Some(orders) if !orders.is_empty() => {
                order.clone_from(&orders[sweep.min(orders.len() - 1)]);
            }
            _ => order.shuffle(rng),
        }
        let mut moved = false;
        for &v in &order {
            stats.visits += 1;
            let mv = moves::best_move(g, p, q, v, &mut scratch);
            if mv.delta > 0.0 {
                moves::apply(g, p, v, &mv);
                stats.moves += 1;
                moved = true;
            }
        }
        sweep += 1;
        if !moved {
            break;
        }
    }
}
