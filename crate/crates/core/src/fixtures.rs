//! Two small weighted graphs with known behaviour.
//!
//! `appendix_b`: a Louvain run in a particular node order leaves a
//! community that is internally disconnected (CPM, resolution 1/7).
//!
//! `appendix_c`: greedy moves always end at quality 14 while the optimum is
//! 15 (CPM, resolution 1).

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::partition::Partition;

pub const NAMES: [&str; 2] = ["appendix_b", "appendix_c"];

#[derive(Debug, Clone)]
pub struct NamedPartition {
    pub name: &'static str,
    pub sets: Vec<NodeSet>,
    /// CPM quality at the fixture's resolution, when known.
    pub quality: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    pub gamma: f64,
    /// Louvain node order reproducing the fixture's story, if any.
    pub visit_order: Option<Vec<usize>>,
    pub partitions: Vec<NamedPartition>,
}

impl Fixture {
    pub fn partition(&self, name: &str) -> Option<Partition> {
        let named = self.partitions.iter().find(|p| p.name == name)?;
        Partition::from_sets(&self.graph, &named.sets).ok()
    }
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "appendix_b" => Ok(appendix_b()),
        "appendix_c" => Ok(appendix_c()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn sets(groups: &[&[usize]]) -> Vec<NodeSet> {
    groups.iter().map(|g| NodeSet::new(g.to_vec())).collect()
}

/// Node 0 holds two heavy edges (to 1 and 4); 1 has leaves 2, 3 and 4 has
/// leaves 5, 6. Nodes 7 to 11 form a unit clique, each linked to node 0.
pub fn appendix_b() -> Fixture {
    let mut edges = vec![(0, 1, 2.0), (0, 4, 2.0), (1, 2, 1.0), (1, 3, 1.0), (4, 5, 1.0), (4, 6, 1.0)];
    for u in 7..12 {
        edges.push((0, u, 1.0));
        for v in u + 1..12 {
            edges.push((u, v, 1.0));
        }
    }
    Fixture {
        name: "appendix_b".into(),
        graph: Graph::from_edges(12, edges).expect("valid fixture"),
        gamma: 1.0 / 7.0,
        visit_order: Some(vec![1, 4, 2, 3, 5, 6, 7, 8, 9, 10, 11, 0]),
        partitions: vec![
            NamedPartition { name: "before", sets: sets(&[&[0, 1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11]]), quality: None },
            NamedPartition { name: "disconnected", sets: sets(&[&[0, 7, 8, 9, 10, 11], &[1, 2, 3, 4, 5, 6]]), quality: None },
        ],
    }
}

/// Nodes 0 and 1 share a weight-3 edge; triangles {2, 3, 4} and {5, 6, 7}
/// have weight-3 edges; 0 links to 2, 3, 4 and 1 links to 5, 6, 7 with
/// weight 3/2.
pub fn appendix_c() -> Fixture {
    let mut edges = vec![(0, 1, 3.0)];
    for t in [[2, 3, 4], [5, 6, 7]] {
        edges.extend([(t[0], t[1], 3.0), (t[1], t[2], 3.0), (t[0], t[2], 3.0)]);
    }
    for v in 2..5 {
        edges.push((0, v, 1.5));
    }
    for v in 5..8 {
        edges.push((1, v, 1.5));
    }
    Fixture {
        name: "appendix_c".into(),
        graph: Graph::from_edges(8, edges).expect("valid fixture"),
        gamma: 1.0,
        visit_order: None,
        partitions: vec![
            NamedPartition { name: "greedy", sets: sets(&[&[0, 1], &[2, 3, 4], &[5, 6, 7]]), quality: Some(14.0) },
            NamedPartition { name: "optimal", sets: sets(&[&[0, 2, 3, 4], &[1, 5, 6, 7]]), quality: Some(15.0) },
        ],
    }
}
