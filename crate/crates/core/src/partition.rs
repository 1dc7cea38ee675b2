//! Partitions of a graph's nodes with incrementally maintained community
//! aggregates, and hierarchies of partitions produced by aggregation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

/// Destination of a node or set move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// An existing, non-empty community.
    Community(usize),
    /// A fresh empty community.
    Empty,
}

/// Assignment of every node to exactly one community.
///
/// Community ids are recycled integers below the node count. Per community the
/// partition caches the summed node size, the internal edge weight `E(C, C)`
/// and the member count; [`Partition::move_node`] keeps them current in
/// `O(degree)`.
#[derive(Debug, Clone)]
pub struct Partition {
    community_of: Vec<usize>,
    size_sum: Vec<f64>,
    internal_weight: Vec<f64>,
    member_count: Vec<usize>,
    free_ids: Vec<usize>,
    nonempty: usize,
}

impl PartialEq for Partition {
    /// Two partitions are equal when they group the nodes identically,
    /// regardless of community ids.
    fn eq(&self, other: &Self) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

impl Partition {
    /// Every node in its own community.
    pub fn singleton(g: &Graph) -> Self {
        let n = g.node_count();
        Partition {
            community_of: (0..n).collect(),
            size_sum: g.node_sizes().to_vec(),
            internal_weight: (0..n).map(|v| g.self_loop(v)).collect(),
            member_count: vec![1; n],
            free_ids: Vec::new(),
            nonempty: n,
        }
    }

    /// Builds a partition from arbitrary labels; nodes sharing a label share
    /// a community.
    pub fn from_assignment(g: &Graph, labels: &[usize]) -> Result<Self> {
        let n = g.node_count();
        if labels.len() != n {
            return Err(Error::PartitionSize { expected: n, found: labels.len() });
        }
        let canonical = CanonicalLabels::from_labels(labels);
        let count = canonical.community_count();
        let mut p = Partition {
            community_of: canonical.0,
            size_sum: vec![0.0; n],
            internal_weight: vec![0.0; n],
            member_count: vec![0; n],
            free_ids: (count..n).rev().collect(),
            nonempty: count,
        };
        p.recompute_aggregates(g);
        Ok(p)
    }

    /// Builds a partition whose communities are the given node sets.
    pub fn from_sets(g: &Graph, sets: &[NodeSet]) -> Result<Self> {
        let n = g.node_count();
        let mut labels = vec![usize::MAX; n];
        for (c, set) in sets.iter().enumerate() {
            for v in set.iter() {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, node_count: n });
                }
                if labels[v] != usize::MAX {
                    return Err(Error::OverlappingSets(v));
                }
                labels[v] = c;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::PartitionSize { expected: n, found: labels.iter().filter(|&&l| l != usize::MAX).count() });
        }
        Self::from_assignment(g, &labels)
    }

    fn recompute_aggregates(&mut self, g: &Graph) {
        let (size_sum, internal_weight, member_count) = self.aggregates_from_scratch(g);
        self.size_sum = size_sum;
        self.internal_weight = internal_weight;
        self.member_count = member_count;
    }

    fn aggregates_from_scratch(&self, g: &Graph) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
        let n = self.community_of.len();
        let mut size_sum = vec![0.0; n];
        let mut internal = vec![0.0; n];
        let mut count = vec![0usize; n];
        for (u, v, w) in g.edges() {
            if self.community_of[u] == self.community_of[v] {
                internal[self.community_of[u]] += w;
            }
        }
        for v in 0..n {
            let c = self.community_of[v];
            size_sum[c] += g.node_size(v);
            count[c] += 1;
        }
        (size_sum, internal, count)
    }

    /// Compares the cached aggregates against a recomputation from scratch.
    /// Member counts must match exactly, sizes and weights within `tolerance`.
    pub fn aggregates_match(&self, g: &Graph, tolerance: f64) -> bool {
        if g.node_count() != self.node_count() {
            return false;
        }
        let (size_sum, internal, count) = self.aggregates_from_scratch(g);
        (0..self.node_count()).all(|c| {
            count[c] == self.member_count[c]
                && libm::fabs(size_sum[c] - self.size_sum[c]) <= tolerance
                && libm::fabs(internal[c] - self.internal_weight[c]) <= tolerance
        }) && self.nonempty == count.iter().filter(|&&k| k > 0).count()
    }

    pub fn node_count(&self) -> usize {
        self.community_of.len()
    }

    /// Number of non-empty communities.
    pub fn community_count(&self) -> usize {
        self.nonempty
    }

    #[inline]
    pub fn community_of(&self, v: usize) -> usize {
        self.community_of[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.community_of
    }

    #[inline]
    pub fn size_sum(&self, c: usize) -> f64 {
        self.size_sum[c]
    }

    #[inline]
    pub fn internal_weight(&self, c: usize) -> f64 {
        self.internal_weight[c]
    }

    #[inline]
    pub fn member_count(&self, c: usize) -> usize {
        self.member_count[c]
    }

    /// Ids of the non-empty communities, ascending.
    pub fn communities(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.member_count.len()).filter(move |&c| self.member_count[c] > 0)
    }

    pub fn is_singleton(&self) -> bool {
        self.nonempty == self.node_count()
    }

    /// Members of every non-empty community, indexed by community id. Empty
    /// ids map to empty lists.
    pub fn members_by_id(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.node_count()];
        for (v, &c) in self.community_of.iter().enumerate() {
            members[c].push(v);
        }
        members
    }

    /// Communities as node sets, ordered by smallest member.
    pub fn node_sets(&self) -> Vec<NodeSet> {
        let labels = self.canonical_form();
        let mut sets = vec![Vec::new(); labels.community_count()];
        for (v, &c) in labels.as_slice().iter().enumerate() {
            sets[c].push(v);
        }
        sets.into_iter().map(NodeSet::new).collect()
    }

    pub(crate) fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, node_count: self.node_count() })
        }
    }

    pub(crate) fn resolve(&self, target: Target) -> Result<Option<usize>> {
        match target {
            Target::Community(c) if c < self.node_count() && self.member_count[c] > 0 => Ok(Some(c)),
            Target::Community(c) => Err(Error::UnknownCommunity(c)),
            Target::Empty => Ok(None),
        }
    }

    /// Moves `v` to `target` and returns the community it ends up in. Moving
    /// the only member of a community to [`Target::Empty`] leaves the
    /// partition unchanged.
    pub fn move_node(&mut self, g: &Graph, v: usize, target: Target) -> Result<usize> {
        self.check_node(v)?;
        let old = self.community_of[v];
        let new = match self.resolve(target)? {
            Some(c) => c,
            None if self.member_count[old] == 1 => return Ok(old),
            None => self.free_ids.pop().ok_or(Error::InconsistentHierarchy("no free community id"))?,
        };
        if new != old {
            let (to_old, to_new) = self.weights_to(g, v, old, new);
            self.relocate(g, v, old, new, to_old, to_new);
        }
        Ok(new)
    }

    /// Moves `v` into community `new` (possibly a recycled empty id obtained
    /// from [`Partition::take_empty`]) given the precomputed weights from `v`
    /// to the rest of its old community and to `new`.
    pub(crate) fn relocate(&mut self, g: &Graph, v: usize, old: usize, new: usize, to_old: f64, to_new: f64) {
        let size = g.node_size(v);
        let own = g.self_loop(v);
        self.member_count[old] -= 1;
        if self.member_count[old] == 0 {
            self.size_sum[old] = 0.0;
            self.internal_weight[old] = 0.0;
            self.free_ids.push(old);
            self.nonempty -= 1;
        } else {
            self.size_sum[old] -= size;
            self.internal_weight[old] -= to_old + own;
        }
        if self.member_count[new] == 0 {
            self.nonempty += 1;
        }
        self.member_count[new] += 1;
        self.size_sum[new] += size;
        self.internal_weight[new] += to_new + own;
        self.community_of[v] = new;
    }

    /// Claims an empty community id for a node that is about to leave a
    /// community with other members.
    pub(crate) fn take_empty(&mut self) -> usize {
        let id = self.free_ids.pop().expect("a non-singleton community implies a free id");
        debug_assert_eq!(self.member_count[id], 0);
        id
    }

    fn weights_to(&self, g: &Graph, v: usize, a: usize, b: usize) -> (f64, f64) {
        let (mut wa, mut wb) = (0.0, 0.0);
        for (u, w) in g.neighbors(v) {
            let c = self.community_of[u];
            if c == a {
                wa += w;
            } else if c == b {
                wb += w;
            }
        }
        (wa, wb)
    }

    /// Labels communities `0, 1, ...` in order of their smallest member.
    pub fn canonical_form(&self) -> CanonicalLabels {
        CanonicalLabels::from_labels(&self.community_of)
    }

    /// Whether every community of `self` lies inside one community of `coarse`.
    pub fn is_refinement_of(&self, coarse: &Partition) -> bool {
        if self.node_count() != coarse.node_count() {
            return false;
        }
        let mut parent = vec![usize::MAX; self.node_count()];
        for v in 0..self.node_count() {
            let c = self.community_of[v];
            let d = coarse.community_of[v];
            if parent[c] == usize::MAX {
                parent[c] = d;
            } else if parent[c] != d {
                return false;
            }
        }
        true
    }
}

/// Community labels renumbered by smallest member. Two partitions are equal
/// exactly when their canonical labels are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalLabels(Vec<usize>);

impl CanonicalLabels {
    pub fn from_labels(labels: &[usize]) -> Self {
        let bound = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut relabel = vec![usize::MAX; bound];
        let mut next = 0;
        let out = labels
            .iter()
            .map(|&l| {
                if relabel[l] == usize::MAX {
                    relabel[l] = next;
                    next += 1;
                }
                relabel[l]
            })
            .collect();
        CanonicalLabels(out)
    }

    pub fn community_count(&self) -> usize {
        self.0.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// One level of a hierarchy: a graph, a partition of it, and the node of the
/// next level's graph that each node was contracted into.
#[derive(Debug, Clone)]
pub struct HierarchyLevel {
    pub graph: Graph,
    pub partition: Partition,
    /// Empty on the top level.
    pub up: Vec<usize>,
}

/// Partitions at every aggregation level of one algorithm run. Level 0 holds
/// the base graph.
#[derive(Debug, Clone, Default)]
pub struct HierarchicalPartition {
    levels: Vec<HierarchyLevel>,
}

impl HierarchicalPartition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, level: HierarchyLevel) {
        self.levels.push(level);
    }

    pub fn levels(&self) -> &[HierarchyLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Top-level node containing each base node.
    pub fn top_nodes(&self) -> Result<Vec<usize>> {
        let base = self.levels.first().ok_or(Error::InconsistentHierarchy("empty hierarchy"))?;
        let mut at: Vec<usize> = (0..base.graph.node_count()).collect();
        for (i, level) in self.levels.iter().enumerate() {
            if level.partition.node_count() != level.graph.node_count() {
                return Err(Error::InconsistentHierarchy("partition does not match its level graph"));
            }
            if i + 1 == self.levels.len() {
                break;
            }
            if level.up.len() != level.graph.node_count() {
                return Err(Error::InconsistentHierarchy("missing node map between levels"));
            }
            let next = self.levels[i + 1].graph.node_count();
            for x in at.iter_mut() {
                *x = level.up[*x];
                if *x >= next {
                    return Err(Error::InconsistentHierarchy("node map points past the next level"));
                }
            }
        }
        Ok(at)
    }

    /// Partition of the base graph in which every base node belongs to the
    /// community of its top-level ancestor.
    pub fn flatten(&self) -> Result<Partition> {
        let top = self.levels.last().ok_or(Error::InconsistentHierarchy("empty hierarchy"))?;
        let labels: Vec<usize> =
            self.top_nodes()?.into_iter().map(|x| top.partition.community_of(x)).collect();
        Partition::from_assignment(&self.levels[0].graph, &labels)
    }
}
