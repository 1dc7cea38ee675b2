//! Weighted undirected graphs with node sizes.
//!
//! Parallel edges are summed into a single weight. A self-loop carries its full
//! weight into the internal weight of the community that contains it and
//! counts twice towards the node's degree, which keeps quality values
//! identical before and after aggregation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Sorted, duplicate-free list of node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    /// Builds a set from arbitrary ids; the ids are sorted and deduplicated.
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        NodeSet(ids)
    }

    /// Like [`NodeSet::new`], but rejects ids outside `[0, node_count)`.
    pub fn within(ids: Vec<usize>, node_count: usize) -> Result<Self> {
        if let Some(&node) = ids.iter().find(|&&v| v >= node_count) {
            return Err(Error::NodeOutOfRange { node, node_count });
        }
        Ok(Self::new(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` inside the set, if present.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    fn check(&self, node_count: usize) -> Result<()> {
        match self.0.last() {
            Some(&node) if node >= node_count => Err(Error::NodeOutOfRange { node, node_count }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet::new(iter.into_iter().collect())
    }
}

impl From<&[usize]> for NodeSet {
    fn from(ids: &[usize]) -> Self {
        NodeSet::new(ids.to_vec())
    }
}

/// Immutable weighted undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    self_loops: Vec<f64>,
    node_sizes: Vec<f64>,
    total_node_size: f64,
    total_edge_weight: f64,
}

/// Result of contracting every community of a partition into one node.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub graph: Graph,
    /// Aggregate node of every node of the contracted graph.
    pub node_map: Vec<usize>,
}

impl Aggregate {
    /// Members of every aggregate node, in ascending order.
    pub fn members(&self) -> Vec<NodeSet> {
        let mut members = vec![Vec::new(); self.graph.node_count()];
        for (v, &a) in self.node_map.iter().enumerate() {
            members[a].push(v);
        }
        members.into_iter().map(NodeSet).collect()
    }
}

impl Graph {
    /// Builds a graph with unit node sizes. Duplicate edges are summed.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::with_sizes(node_count, edges, vec![1.0; node_count])
    }

    /// Builds a graph with explicit node sizes.
    pub fn with_sizes<I>(node_count: usize, edges: I, node_sizes: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_sizes.len() != node_count {
            return Err(Error::NodeSizeCount { expected: node_count, found: node_sizes.len() });
        }
        check_sizes(&node_sizes)?;

        let mut list: Vec<(usize, usize, f64)> = Vec::new();
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            list.push((u.min(v), u.max(v), w));
        }
        list.sort_unstable_by_key(|&(u, v, _)| (u, v));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
        for (u, v, w) in list {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        Ok(Self::from_sorted_unique(node_count, &merged, node_sizes))
    }

    fn from_sorted_unique(node_count: usize, edges: &[(usize, usize, f64)], node_sizes: Vec<f64>) -> Self {
        let mut self_loops = vec![0.0; node_count];
        let mut degree_count = vec![0usize; node_count];
        let mut total_edge_weight = 0.0;
        for &(u, v, w) in edges {
            total_edge_weight += w;
            if u == v {
                self_loops[u] = w;
            } else {
                degree_count[u] += 1;
                degree_count[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for &d in &degree_count {
            let last = *offsets.last().unwrap();
            offsets.push(last + d);
        }
        let slots = *offsets.last().unwrap();
        let mut targets = vec![0usize; slots];
        let mut weights = vec![0.0; slots];
        let mut cursor = offsets[..node_count].to_vec();
        for &(u, v, w) in edges {
            if u == v {
                continue;
            }
            targets[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            weights[cursor[v]] = w;
            cursor[v] += 1;
        }
        let total_node_size = node_sizes.iter().sum();
        Graph { offsets, targets, weights, self_loops, node_sizes, total_node_size, total_edge_weight }
    }

    /// Same graph with new node sizes.
    pub fn with_node_sizes(mut self, node_sizes: Vec<f64>) -> Result<Self> {
        if node_sizes.len() != self.node_count() {
            return Err(Error::NodeSizeCount { expected: self.node_count(), found: node_sizes.len() });
        }
        check_sizes(&node_sizes)?;
        self.total_node_size = node_sizes.iter().sum();
        self.node_sizes = node_sizes;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_sizes.len()
    }

    /// Number of distinct undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2 + self.self_loops.iter().filter(|&&w| w > 0.0).count()
    }

    /// Sum of all edge weights, each undirected edge and self-loop counted once.
    pub fn total_edge_weight(&self) -> f64 {
        self.total_edge_weight
    }

    pub fn total_node_size(&self) -> f64 {
        self.total_node_size
    }

    #[inline]
    pub fn node_size(&self, v: usize) -> f64 {
        self.node_sizes[v]
    }

    pub fn node_sizes(&self) -> &[f64] {
        &self.node_sizes
    }

    #[inline]
    pub fn self_loop(&self, v: usize) -> f64 {
        self.self_loops[v]
    }

    /// Neighbours of `v` in ascending order, excluding `v` itself.
    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_count(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Every edge once as `(u, v, w)` with `u <= v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            let own = self.self_loops[u];
            let self_edge = (own > 0.0).then_some((u, u, own));
            self_edge
                .into_iter()
                .chain(self.neighbors(u).filter(move |&(v, _)| v > u).map(move |(v, w)| (u, v, w)))
        })
    }

    /// Largest edge weight, self-loops excluded; zero for an edgeless graph.
    pub fn max_edge_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, node_count: self.node_count() })
        }
    }

    /// Weighted degree with self-loops counted twice.
    pub fn degree_weight(&self, v: usize) -> Result<f64> {
        self.check_node(v)?;
        Ok(self.degree(v))
    }

    #[inline]
    pub(crate) fn degree(&self, v: usize) -> f64 {
        self.neighbors(v).map(|(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[v]
    }

    /// Weighted degrees of all nodes.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    /// Total weight of edges with one end in `s` and the other in `r`, each
    /// undirected edge counted once. With `s == r` this is the internal weight
    /// of the set, self-loops included.
    pub fn edge_weight_between(&self, s: &NodeSet, r: &NodeSet) -> Result<f64> {
        s.check(self.node_count())?;
        r.check(self.node_count())?;
        let mut total = 0.0;
        for u in s.iter() {
            let u_in_r = r.contains(u);
            if u_in_r {
                total += self.self_loops[u];
            }
            for (v, w) in self.neighbors(u) {
                if !r.contains(v) {
                    continue;
                }
                // An edge inside s ∩ r is seen from both ends.
                if u_in_r && s.contains(v) && v < u {
                    continue;
                }
                total += w;
            }
        }
        Ok(total)
    }

    /// Subgraph induced by `s`, with node `i` of the result standing for the
    /// `i`-th smallest member of `s`. Returns the subgraph and that mapping.
    pub fn induced_subgraph(&self, s: &NodeSet) -> Result<(Graph, Vec<usize>)> {
        if s.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        s.check(self.node_count())?;
        let mut edges = Vec::new();
        for (i, u) in s.iter().enumerate() {
            if self.self_loops[u] > 0.0 {
                edges.push((i, i, self.self_loops[u]));
            }
            for (v, w) in self.neighbors(u) {
                if v > u {
                    if let Some(j) = s.index_of(v) {
                        edges.push((i, j, w));
                    }
                }
            }
        }
        let sizes = s.iter().map(|v| self.node_sizes[v]).collect();
        // Edges are produced in sorted order without duplicates.
        let graph = Self::from_sorted_unique(s.len(), &edges, sizes);
        Ok((graph, s.as_slice().to_vec()))
    }

    /// Maximal connected node sets, ordered by their smallest member.
    pub fn connected_components(&self) -> Vec<NodeSet> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            components.push(NodeSet::new(members));
        }
        components
    }

    /// Contracts every community of `p` into one node. Aggregate nodes are
    /// numbered by the smallest member of their community; sizes add up and
    /// internal weight becomes a self-loop.
    pub fn aggregate(&self, p: &Partition) -> Result<Aggregate> {
        if p.node_count() != self.node_count() {
            return Err(Error::PartitionSize { expected: self.node_count(), found: p.node_count() });
        }
        let labels = p.canonical_form();
        let count = labels.community_count();
        let node_map = labels.into_vec();
        let mut sizes = vec![0.0; count];
        for (v, &a) in node_map.iter().enumerate() {
            sizes[a] += self.node_sizes[v];
        }
        let edges = self.edges().map(|(u, v, w)| (node_map[u], node_map[v], w));
        let graph = Self::with_sizes(count, edges, sizes)?;
        Ok(Aggregate { graph, node_map })
    }

    /// Recomputes the cached total edge weight from the adjacency structure.
    pub fn recomputed_total_edge_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Checks symmetry and the cached totals.
    pub fn is_consistent(&self) -> bool {
        for u in 0..self.node_count() {
            for (v, w) in self.neighbors(u) {
                let back = self.neighbors(v).find(|&(x, _)| x == u).map(|(_, w)| w);
                if back != Some(w) || w < 0.0 {
                    return false;
                }
            }
        }
        self.recomputed_total_edge_weight() == self.total_edge_weight
            && self.node_sizes.iter().all(|&s| s >= 0.0)
    }
}

fn check_sizes(sizes: &[f64]) -> Result<()> {
    match sizes.iter().position(|&s| !s.is_finite() || s < 0.0) {
        Some(node) => Err(Error::InvalidNodeSize { node, size: sizes[node] }),
        None => Ok(()),
    }
}
