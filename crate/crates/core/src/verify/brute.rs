//! Exhaustive oracles over small graphs: optimal partitions, constructive
//! non-decreasing build sequences, and the set of partitions reachable by
//! greedy single-node moves.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{canonical_sets, check_sizes, not_above};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{CanonicalLabels, Partition, Target};
use crate::quality::{quality, QualityConfig};

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 12;

/// An optimal partition found by enumerating every set partition, and its
/// quality. Among partitions of equal quality the one whose canonical labels
/// come first lexicographically wins.
pub fn brute_force_optimal(g: &Graph, q: &QualityConfig, n_limit: usize) -> Result<(Partition, f64)> {
    let n = g.node_count();
    if n > n_limit {
        return Err(Error::TooLarge { nodes: n, limit: n_limit });
    }
    if n == 0 {
        return Ok((Partition::singleton(g), 0.0));
    }
    let mut search = Search {
        g,
        q,
        labels: vec![0; n],
        size: vec![0.0; n],
        acc: vec![vec![0.0; n]; n],
        best: f64::NEG_INFINITY,
        best_labels: vec![0; n],
    };
    search.descend(0, 0, 0.0);
    let best = search.best;
    Ok((Partition::from_assignment(g, &search.best_labels)?, best))
}

struct Search<'a> {
    g: &'a Graph,
    q: &'a QualityConfig,
    labels: Vec<usize>,
    size: Vec<f64>,
    /// Per depth: weight from the node at that depth to each community.
    acc: Vec<Vec<f64>>,
    best: f64,
    best_labels: Vec<usize>,
}

impl Search<'_> {
    /// Assigns node `v` given `k` communities so far and quality `h`.
    #[allow(clippy::needless_range_loop)]
    fn descend(&mut self, v: usize, k: usize, h: f64) {
        if v == self.g.node_count() {
            if self.best == f64::NEG_INFINITY || !not_above(h, self.best) {
                self.best = h;
                self.best_labels.clone_from(&self.labels);
            }
            return;
        }
        let x = self.g.node_size(v);
        let base = h + self.g.self_loop(v) - self.q.pair_penalty(x);
        let mut acc = core::mem::take(&mut self.acc[v]);
        acc[..k].iter_mut().for_each(|a| *a = 0.0);
        for (u, w) in self.g.neighbors(v) {
            if u < v {
                acc[self.labels[u]] += w;
            }
        }
        for c in 0..=k {
            let gain = if c < k { acc[c] - self.q.penalty(x, self.size[c]) } else { 0.0 };
            self.labels[v] = c;
            self.size[c] += x;
            self.descend(v + 1, k.max(c + 1), base + gain);
            self.size[c] -= x;
        }
        self.acc[v] = acc;
    }
}

/// Node orders that build every community of a partition from one seed node
/// through moves that never decrease quality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSequence {
    /// One order per community (canonical order); the first node is the seed.
    pub orders: Vec<Vec<usize>>,
    /// Total number of moves, `n - |P|`.
    pub steps: usize,
}

/// Builds each community of `target` starting from its smallest node by
/// repeatedly adding the outside member with the largest non-negative gain.
/// Returns `None` when some community gets stuck, which cannot happen for an
/// optimal partition.
pub fn find_nondecreasing_build_sequence(g: &Graph, target: &Partition, q: &QualityConfig) -> Result<Option<BuildSequence>> {
    check_sizes(g, target)?;
    let mut to_built = vec![0.0; g.node_count()];
    let mut built = vec![false; g.node_count()];
    let mut orders = Vec::new();
    let mut steps = 0;
    for set in canonical_sets(target) {
        let members = set.as_slice();
        let mut order = vec![members[0]];
        let mut size = g.node_size(members[0]);
        let add = |v: usize, built: &mut Vec<bool>, to_built: &mut Vec<f64>| {
            built[v] = true;
            for (u, w) in g.neighbors(v) {
                to_built[u] += w;
            }
        };
        add(members[0], &mut built, &mut to_built);
        while order.len() < members.len() {
            let mut best: Option<(usize, f64)> = None;
            for &v in members.iter().filter(|&&v| !built[v]) {
                let delta = to_built[v] - q.penalty(g.node_size(v), size);
                if best.map_or(true, |(_, d)| delta > d) {
                    best = Some((v, delta));
                }
            }
            let (v, delta) = best.expect("community has unbuilt members");
            if !not_above(0.0, delta) {
                return Ok(None);
            }
            add(v, &mut built, &mut to_built);
            size += g.node_size(v);
            order.push(v);
            steps += 1;
        }
        orders.push(order);
    }
    Ok(Some(BuildSequence { orders, steps }))
}

/// Partitions reachable from the singleton partition by greedy moves, where
/// each move takes one node to a community maximizing quality (ties branch).
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyReachability {
    pub states: BTreeSet<CanonicalLabels>,
    /// Reachable partitions in which no node has a strictly improving move,
    /// with their qualities.
    pub terminal: Vec<(CanonicalLabels, f64)>,
}

impl GreedyReachability {
    pub fn contains(&self, p: &Partition) -> bool {
        self.states.contains(&p.canonical_form())
    }
}

/// Explores every greedy move sequence from the singleton partition.
pub fn greedy_reachable_partitions(g: &Graph, q: &QualityConfig, n_limit: usize) -> Result<GreedyReachability> {
    let n = g.node_count();
    if n > n_limit {
        return Err(Error::TooLarge { nodes: n, limit: n_limit });
    }
    let start = Partition::singleton(g).canonical_form();
    let mut states = BTreeSet::new();
    let mut terminal = Vec::new();
    let mut queue = VecDeque::from([start.clone()]);
    states.insert(start);
    let mut scratch = crate::moves::NeighborWeights::new(n);
    while let Some(labels) = queue.pop_front() {
        let p = Partition::from_assignment(g, labels.as_slice())?;
        let mut improving = false;
        for v in 0..n {
            scratch.collect(g, &p, v, |_| true);
            let own = p.community_of(v);
            let x = g.node_size(v);
            let stay = scratch.weight(own) - q.penalty(x, p.size_sum(own) - x);
            let mut options: Vec<(Target, f64)> = vec![(Target::Community(own), 0.0)];
            if p.member_count(own) > 1 {
                options.push((Target::Empty, -stay));
            }
            for &c in scratch.touched() {
                if c != own {
                    options.push((Target::Community(c), scratch.weight(c) - q.penalty(x, p.size_sum(c)) - stay));
                }
            }
            let top = options.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
            if !not_above(top, 0.0) {
                improving = true;
            }
            for &(target, delta) in &options {
                if target == Target::Community(own) || !not_above(top, delta) {
                    continue;
                }
                let mut next = p.clone();
                next.move_node(g, v, target)?;
                let form = next.canonical_form();
                if states.insert(form.clone()) {
                    queue.push_back(form);
                }
            }
        }
        if !improving {
            let h = quality(g, &p, q)?;
            terminal.push((labels, h));
        }
    }
    scratch.clear();
    Ok(GreedyReachability { states, terminal })
}
