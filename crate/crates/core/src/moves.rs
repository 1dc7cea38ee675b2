//! Best-move evaluation shared by the local-moving phases.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::partition::{Partition, Target};
use crate::quality::QualityConfig;

/// Scratch space for accumulating a node's edge weight per neighbouring
/// community without clearing an `O(n)` array on every visit.
pub(crate) struct NeighborWeights {
    weight: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl NeighborWeights {
    pub(crate) fn new(n: usize) -> Self {
        NeighborWeights { weight: vec![0.0; n], seen: vec![false; n], touched: Vec::new() }
    }

    /// Collects the weight from `v` to every community of its neighbours, in
    /// neighbour order of first appearance. `keep` filters neighbours.
    pub(crate) fn collect(&mut self, g: &Graph, p: &Partition, v: usize, mut keep: impl FnMut(usize) -> bool) {
        self.clear();
        for (u, w) in g.neighbors(v) {
            if !keep(u) {
                continue;
            }
            let c = p.community_of(u);
            if !self.seen[c] {
                self.seen[c] = true;
                self.touched.push(c);
            }
            self.weight[c] += w;
        }
    }

    pub(crate) fn clear(&mut self) {
        for &c in &self.touched {
            self.weight[c] = 0.0;
            self.seen[c] = false;
        }
        self.touched.clear();
    }

    #[inline]
    pub(crate) fn weight(&self, c: usize) -> f64 {
        self.weight[c]
    }

    pub(crate) fn touched(&self) -> &[usize] {
        &self.touched
    }
}

/// Outcome of evaluating one node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BestMove {
    pub target: Target,
    pub delta: f64,
    /// Weight from the node to the rest of its current community.
    pub to_current: f64,
    /// Weight from the node to the chosen target (zero for `Empty`).
    pub to_target: f64,
}

/// Argmax of the quality change over the current community, the empty
/// community and the communities of neighbours. The current community wins
/// every tie; among other candidates the first one encountered in neighbour
/// order wins. `Target::Community(current)` with delta 0 means "stay".
pub(crate) fn best_move(g: &Graph, p: &Partition, q: &QualityConfig, v: usize, scratch: &mut NeighborWeights) -> BestMove {
    scratch.collect(g, p, v, |_| true);
    let current = p.community_of(v);
    let size = g.node_size(v);
    let to_current = scratch.weight(current);
    let stay = to_current - q.penalty(size, p.size_sum(current) - size);
    let mut best = BestMove { target: Target::Community(current), delta: 0.0, to_current, to_target: to_current };
    for &c in scratch.touched() {
        if c == current {
            continue;
        }
        let w = scratch.weight(c);
        let delta = (w - q.penalty(size, p.size_sum(c))) - stay;
        if delta > best.delta {
            best = BestMove { target: Target::Community(c), delta, to_current, to_target: w };
        }
    }
    if p.member_count(current) > 1 && -stay > best.delta {
        best = BestMove { target: Target::Empty, delta: -stay, to_current, to_target: 0.0 };
    }
    best
}

/// Applies a move found by [`best_move`]. Returns the new community.
pub(crate) fn apply(g: &Graph, p: &mut Partition, v: usize, mv: &BestMove) -> usize {
    let old = p.community_of(v);
    let new = match mv.target {
        Target::Community(c) => c,
        Target::Empty => p.take_empty(),
    };
    if new != old {
        p.relocate(g, v, old, new, mv.to_current, mv.to_target);
    }
    new
}
