//! Planted-partition benchmark graphs: equal-size communities, a fixed mean
//! degree, and a mixing probability `mu` for an edge to cross communities.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkSpec {
    pub n: usize,
    pub community_size: usize,
    pub mean_degree: f64,
    pub mu: f64,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(n: usize, mu: f64, seed: u64) -> Self {
        BenchmarkSpec { n, community_size: 50, mean_degree: 10.0, mu, seed }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidBenchmark(msg.into()));
        if self.n < 2 {
            return bad("need at least two nodes");
        }
        if self.community_size < 2 || self.community_size > self.n {
            return bad("community size must lie in [2, n]");
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad("mu must lie in [0, 1]");
        }
        if !(self.mean_degree >= 0.0 && self.mean_degree.is_finite()) {
            return bad("mean degree must be non-negative");
        }
        if self.mu > 0.0 && self.community_count() < 2 {
            return bad("mixing needs at least two communities");
        }
        let (intra, inter) = self.pair_counts();
        let (want_intra, want_inter) = self.expected_edges();
        // Rejection sampling of distinct pairs stays cheap below half capacity.
        if want_intra > intra / 2.0 || want_inter > inter / 2.0 {
            return Err(Error::InvalidBenchmark(format!(
                "density too high: {want_intra:.0} intra edges for {intra:.0} pairs, {want_inter:.0} inter edges for {inter:.0} pairs"
            )));
        }
        Ok(())
    }

    /// Number of communities; the last one is truncated when `n` is not a
    /// multiple of the community size.
    pub fn community_count(&self) -> usize {
        self.n.div_ceil(self.community_size)
    }

    pub fn edge_count(&self) -> usize {
        libm::round(self.n as f64 * self.mean_degree / 2.0) as usize
    }

    fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.community_count()).map(move |c| (self.n - c * self.community_size).min(self.community_size))
    }

    /// Node pairs inside communities and between communities.
    fn pair_counts(&self) -> (f64, f64) {
        let n = self.n as f64;
        let intra: f64 = self.sizes().map(|s| (s * (s - 1) / 2) as f64).sum();
        (intra, n * (n - 1.0) / 2.0 - intra)
    }

    fn expected_edges(&self) -> (f64, f64) {
        let m = self.edge_count() as f64;
        ((1.0 - self.mu) * m, self.mu * m)
    }
}

/// Resolution chosen halfway between the planted edge densities inside and
/// between communities: `gamma = (p_in + p_out) / 2` with
/// `p_in = (1 - mu) M / intra_pairs` and `p_out = mu M / inter_pairs`,
/// where `M = round(n k / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionRule {
    pub p_in: f64,
    pub p_out: f64,
    pub gamma: f64,
}

pub fn resolution_for_mu(spec: &BenchmarkSpec) -> Result<ResolutionRule> {
    spec.validate()?;
    let (intra, inter) = spec.pair_counts();
    let (want_intra, want_inter) = spec.expected_edges();
    let p_in = want_intra / intra;
    let p_out = if inter > 0.0 { want_inter / inter } else { 0.0 };
    Ok(ResolutionRule { p_in, p_out, gamma: (p_in + p_out) / 2.0 })
}

/// A generated benchmark graph and its ground truth.
#[derive(Debug, Clone)]
pub struct Planted {
    pub graph: Graph,
    pub truth: Partition,
    pub intra_edges: usize,
    pub inter_edges: usize,
}

/// Samples `round(n k / 2)` distinct edges. Each edge independently lies
/// inside a uniformly chosen community with probability `1 - mu`, otherwise
/// it joins a uniform node to a uniform node of another community.
pub fn generate_planted(spec: &BenchmarkSpec) -> Result<Planted> {
    spec.validate()?;
    let mut rng = crate::seeded_rng(spec.seed);
    let size = spec.community_size;
    let sizes: Vec<usize> = spec.sizes().collect();
    let intra_communities: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] >= 2).collect();
    let community = |v: usize| v / size;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(spec.edge_count());
    let (mut intra, mut inter) = (0, 0);
    while edges.len() < spec.edge_count() {
        let inside = !rng.gen_bool(spec.mu);
        let (u, v) = if inside {
            let c = intra_communities[rng.gen_range(0..intra_communities.len())];
            let base = c * size;
            (base + rng.gen_range(0..sizes[c]), base + rng.gen_range(0..sizes[c]))
        } else {
            let u = rng.gen_range(0..spec.n);
            let outside = spec.n - sizes[community(u)];
            let mut i = rng.gen_range(0..outside);
            if i >= community(u) * size {
                i += sizes[community(u)];
            }
            (u, i)
        };
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        if inside {
            intra += 1;
        } else {
            inter += 1;
        }
        edges.push((u.min(v), u.max(v), 1.0));
    }
    let graph = Graph::from_edges(spec.n, edges)?;
    let labels: Vec<usize> = (0..spec.n).map(community).collect();
    let truth = Partition::from_assignment(&graph, &labels)?;
    Ok(Planted { graph, truth, intra_edges: intra, inter_edges: inter })
}

/// Gadgets in which a hub node holds two dense wings together while being
/// pulled more strongly, in total, towards a magnet made of several parts.
///
/// Every piece (wing or magnet part) is a `G(piece_size, piece_density)`
/// random graph. The hub links to `wing_links` nodes of each wing and to
/// `magnet_links` nodes of each magnet part; consecutive magnet parts share
/// `magnet_glue` edges. `noise_edges` random edges per gadget join nodes of
/// different gadgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeRichSpec {
    pub gadgets: usize,
    pub piece_size: usize,
    pub piece_density: f64,
    pub wing_links: usize,
    pub magnet_parts: usize,
    pub magnet_links: usize,
    pub magnet_glue: usize,
    pub noise_edges: usize,
    pub seed: u64,
}

impl BridgeRichSpec {
    pub fn new(seed: u64) -> Self {
        BridgeRichSpec {
            gadgets: 8,
            piece_size: 20,
            piece_density: 0.5,
            wing_links: 10,
            magnet_parts: 3,
            magnet_links: 8,
            magnet_glue: 15,
            noise_edges: 10,
            seed,
        }
    }

    fn pieces(&self) -> usize {
        2 + self.magnet_parts
    }

    /// Nodes per gadget: the hub, then the two wings, then the magnet parts.
    pub fn gadget_size(&self) -> usize {
        1 + self.pieces() * self.piece_size
    }

    pub fn node_count(&self) -> usize {
        self.gadgets * self.gadget_size()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidBenchmark(msg.into()));
        if self.gadgets == 0 || self.piece_size < 2 || self.magnet_parts == 0 {
            return bad("need at least one gadget, pieces of two nodes and one magnet part");
        }
        if !(0.0..=1.0).contains(&self.piece_density) {
            return bad("piece density must lie in [0, 1]");
        }
        if self.wing_links > self.piece_size || self.magnet_links > self.piece_size {
            return bad("hub links exceed the piece size");
        }
        if self.magnet_glue > self.piece_size * self.piece_size / 2 {
            return bad("magnet glue exceeds half the pairs between two parts");
        }
        if self.noise_edges > 0 && self.gadgets < 2 {
            return bad("noise edges need at least two gadgets");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BridgeRich {
    pub graph: Graph,
    pub hubs: Vec<usize>,
    /// Each gadget's hub with its wings, and its magnet parts together.
    pub intended: Partition,
}

pub fn generate_bridge_rich(spec: &BridgeRichSpec) -> Result<BridgeRich> {
    spec.validate()?;
    let mut rng = crate::seeded_rng(spec.seed);
    let size = spec.piece_size;
    let gadget = spec.gadget_size();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut add = |u: usize, v: usize, edges: &mut Vec<(usize, usize, f64)>| {
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v), 1.0));
            true
        } else {
            false
        }
    };
    let mut labels = Vec::with_capacity(spec.node_count());
    let mut hubs = Vec::with_capacity(spec.gadgets);
    for g in 0..spec.gadgets {
        let hub = g * gadget;
        let piece = |i: usize| hub + 1 + i * size;
        hubs.push(hub);
        labels.push(2 * g);
        labels.extend(core::iter::repeat(2 * g).take(2 * size));
        labels.extend(core::iter::repeat(2 * g + 1).take(spec.magnet_parts * size));
        for i in 0..spec.pieces() {
            for a in 0..size {
                for b in a + 1..size {
                    if rng.gen_bool(spec.piece_density) {
                        add(piece(i) + a, piece(i) + b, &mut edges);
                    }
                }
            }
            let links = if i < 2 { spec.wing_links } else { spec.magnet_links };
            for a in rand::seq::index::sample(&mut rng, size, links) {
                add(hub, piece(i) + a, &mut edges);
            }
        }
        for part in 1..spec.magnet_parts {
            let (left, right) = (piece(1 + part), piece(2 + part));
            let mut placed = 0;
            while placed < spec.magnet_glue {
                if add(left + rng.gen_range(0..size), right + rng.gen_range(0..size), &mut edges) {
                    placed += 1;
                }
            }
        }
    }
    let n = spec.node_count();
    let mut placed = 0;
    while placed < spec.noise_edges * spec.gadgets {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u / gadget != v / gadget && add(u, v, &mut edges) {
            placed += 1;
        }
    }
    let graph = Graph::from_edges(n, edges)?;
    let intended = Partition::from_assignment(&graph, &labels)?;
    Ok(BridgeRich { graph, hubs, intended })
}
