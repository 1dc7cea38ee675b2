#![allow(dead_code)]

use community_core::{Graph, Partition};
use proptest::prelude::*;
use rand::Rng;

/// Weighted edges over `n` nodes, self-loops allowed.
pub fn weighted_edges(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let edge = (0..n, 0..n, prop_oneof![Just(1.0), Just(0.5), Just(2.0), 0.1f64..3.0]);
        (Just(n), proptest::collection::vec(edge, 1..3 * n))
    })
}

pub fn graph_and_labels(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    weighted_edges(max_n).prop_flat_map(|(n, edges)| {
        let g = Graph::from_edges(n, edges).unwrap();
        (Just(g), proptest::collection::vec(0..n, n))
    })
}

/// Unweighted G(n, p) graph.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Symmetric adjacency matrix with self-loops on the diagonal at twice
/// their weight, so row sums are degrees.
pub fn adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v, w) in g.edges() {
        if u == v {
            a[u][u] += 2.0 * w;
        } else {
            a[u][v] += w;
            a[v][u] += w;
        }
    }
    a
}

/// CPM straight from the definition for unit node sizes: internal weight
/// minus `gamma` times the number of node pairs, per community.
pub fn cpm_oracle(g: &Graph, labels: &[usize], gamma: f64) -> f64 {
    let a = adjacency(g);
    let n = labels.len();
    let mut h = 0.0;
    for i in 0..n {
        for j in i..n {
            if labels[i] == labels[j] {
                h += if i == j { a[i][i] / 2.0 } else { a[i][j] - gamma };
            }
        }
    }
    h
}

/// Newman modularity: `(1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] [c_i = c_j]`.
pub fn modularity_oracle(g: &Graph, labels: &[usize], gamma: f64) -> f64 {
    let a = adjacency(g);
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let n = labels.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

pub fn partition(g: &Graph, labels: &[usize]) -> Partition {
    Partition::from_assignment(g, labels).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
