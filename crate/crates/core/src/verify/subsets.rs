//! Subset-based checks on a single community: exact enumeration over
//! bitmasks for small communities, merge-tree certificates and sampled
//! searches for large ones.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{not_above, Method, Verdict, VerifyConfig, MAX_EXACT_LIMIT};
use crate::error::Result;
use crate::graph::{Graph, NodeSet};
use crate::quality::QualityConfig;

/// Communities above this size get no merge-tree certificate.
const CERTIFICATE_LIMIT: usize = 4096;
/// Start nodes for breadth-first grown candidate sets.
const GROWN_STARTS: usize = 64;

fn exact_limit(cfg: &VerifyConfig) -> usize {
    cfg.exact_limit.min(MAX_EXACT_LIMIT)
}

/// The community with local indices `0..k` and sparse local adjacency.
struct Local {
    k: usize,
    adj: Vec<Vec<(usize, f64)>>,
    size: Vec<f64>,
    /// Weight from each node to the rest of the community.
    inner_degree: Vec<f64>,
    total: f64,
}

impl Local {
    fn new(g: &Graph, set: &NodeSet) -> Self {
        let k = set.len();
        let mut adj = vec![Vec::new(); k];
        for (i, v) in set.iter().enumerate() {
            for (u, w) in g.neighbors(v) {
                if let Some(j) = set.index_of(u) {
                    adj[i].push((j, w));
                }
            }
        }
        let size: Vec<f64> = set.iter().map(|v| g.node_size(v)).collect();
        let inner_degree = adj.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        let total = size.iter().sum();
        Local { k, adj, size, inner_degree, total }
    }

    fn positive_sizes(&self) -> bool {
        self.size.iter().all(|&s| s > 0.0)
    }

    /// Internal weight and size of every subset, indexed by bitmask.
    fn tables(&self) -> (Vec<f64>, Vec<f64>) {
        let len = 1usize << self.k;
        let mut weight = vec![0.0; len];
        let mut size = vec![0.0; len];
        for mask in 1..len {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let into_rest: f64 = self.adj[low].iter().filter(|&&(j, _)| rest >> j & 1 == 1).map(|&(_, w)| w).sum();
            weight[mask] = weight[rest] + into_rest;
            size[mask] = size[rest] + self.size[low];
        }
        (weight, size)
    }
}

/// Whether the split of a set with internal weight `whole` into parts with
/// internal weights `a`, `b` and sizes `sa`, `sb` satisfies
/// `E(A, B) >= g ||A|| ||B||`.
#[inline]
fn split_ok(q: &QualityConfig, whole: f64, a: f64, b: f64, sa: f64, sb: f64) -> bool {
    not_above(q.penalty(sa, sb), whole - a - b)
}

/// Gamma-connectivity and subpartition gamma-density of one community.
pub(super) fn connectivity_and_density(
    g: &Graph,
    set: &NodeSet,
    q: &QualityConfig,
    connected: bool,
    cfg: &VerifyConfig,
) -> Result<(Verdict, Verdict)> {
    let local = Local::new(g, set);
    if local.k <= exact_limit(cfg) {
        let (c, d) = exact_connectivity(&local, q);
        return Ok((Verdict::exact(c), Verdict::exact(d)));
    }
    if !connected && local.positive_sizes() {
        return Ok((Verdict::exact(false), Verdict::exact(false)));
    }
    if local.k > CERTIFICATE_LIMIT {
        let skipped = Verdict::unknown(Method::SkippedTooLarge);
        return Ok((skipped, skipped));
    }
    let density = merge_tree(&local, q, true);
    let conn = if density { true } else { merge_tree(&local, q, false) };
    let verdict = |found: bool| {
        if found {
            Verdict { holds: Some(true), method: Method::Certificate }
        } else {
            Verdict::unknown(Method::SkippedTooLarge)
        }
    };
    Ok((verdict(conn), verdict(density)))
}

/// Decides both recursive-split properties over all subsets.
fn exact_connectivity(local: &Local, q: &QualityConfig) -> (bool, bool) {
    let k = local.k;
    if k == 1 {
        return (true, true);
    }
    let (weight, size) = local.tables();
    let full = (1usize << k) - 1;
    let alone_ok = |s: usize| split_ok(q, weight[full], weight[s], weight[full ^ s], size[s], size[full ^ s]);
    let mut conn = vec![false; full + 1];
    let mut dense = vec![false; full + 1];
    for mask in 1..=full {
        let may_be_dense = mask == full || alone_ok(mask);
        if mask.is_power_of_two() {
            conn[mask] = true;
            dense[mask] = may_be_dense;
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let (mut c, mut d) = (false, false);
        let mut sub = rest;
        loop {
            sub = sub.wrapping_sub(1) & rest;
            let r = low | sub;
            let t = mask ^ r;
            let pair_conn = conn[r] && conn[t];
            let pair_dense = may_be_dense && dense[r] && dense[t];
            if ((pair_conn && !c) || (pair_dense && !d)) && split_ok(q, weight[mask], weight[r], weight[t], size[r], size[t]) {
                c |= pair_conn;
                d |= pair_dense;
            }
            if (c && (d || !may_be_dense)) || sub == 0 {
                break;
            }
        }
        conn[mask] = c;
        dense[mask] = d;
    }
    (conn[full], dense[full])
}

/// Greedy agglomeration witnessing gamma-connectivity (or, with `density`,
/// subpartition gamma-density): parts are merged only across splits that
/// satisfy the gate, so reaching a single part proves the property.
fn merge_tree(local: &Local, q: &QualityConfig, density: bool) -> bool {
    let k = local.k;
    let alone_ok = |ext: f64, s: f64| not_above(q.penalty(s, local.total - s), ext);
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
    for (i, row) in local.adj.iter().enumerate() {
        for &(j, w) in row {
            if i != j {
                *links[i].entry(j).or_insert(0.0) += w;
            }
        }
    }
    let mut size = local.size.clone();
    let mut ext = local.inner_degree.clone();
    for i in 0..k {
        ext[i] -= local.adj[i].iter().filter(|&&(j, _)| j == i).map(|&(_, w)| w).sum::<f64>();
        if density && !alone_ok(ext[i], size[i]) {
            return false;
        }
    }
    let mut alive = vec![true; k];
    let mut parts = k;
    while parts > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for x in (0..k).filter(|&x| alive[x]) {
            for (&y, &w) in &links[x] {
                if y < x {
                    continue;
                }
                if !split_ok(q, w, 0.0, 0.0, size[x], size[y]) {
                    continue;
                }
                let merged = size[x] + size[y];
                if density && !alone_ok(ext[x] + ext[y] - 2.0 * w, merged) {
                    continue;
                }
                let score = w / (size[x] * size[y]).max(f64::MIN_POSITIVE);
                if best.map_or(true, |(_, _, s)| score > s) {
                    best = Some((x, y, score));
                }
            }
        }
        let Some((x, y, _)) = best else { return false };
        let (keep, gone) = if links[x].len() >= links[y].len() { (x, y) } else { (y, x) };
        let between = links[keep].remove(&gone).unwrap_or(0.0);
        let moved = core::mem::take(&mut links[gone]);
        for (z, w) in moved {
            if z == keep {
                continue;
            }
            let entry = links[z].remove(&gone).unwrap_or(0.0);
            debug_assert!((entry - w).abs() <= 1e-9 * (1.0 + w.abs()));
            *links[z].entry(keep).or_insert(0.0) += w;
            *links[keep].entry(z).or_insert(0.0) += w;
        }
        ext[keep] += ext[gone] - 2.0 * between;
        size[keep] += size[gone];
        alive[gone] = false;
        parts -= 1;
    }
    true
}

/// Uniform gamma-density of one community.
pub(super) fn uniform_density<R: Rng + ?Sized>(
    g: &Graph,
    set: &NodeSet,
    q: &QualityConfig,
    connected: bool,
    cfg: &VerifyConfig,
    rng: &mut R,
) -> Result<Verdict> {
    let local = Local::new(g, set);
    if local.k <= exact_limit(cfg) {
        let (weight, size) = local.tables();
        let full = (1usize << local.k) - 1;
        let ok = (1..full).all(|s| split_ok(q, weight[full], weight[s], weight[full ^ s], size[s], size[full ^ s]));
        return Ok(Verdict::exact(ok));
    }
    if !connected && local.positive_sizes() {
        return Ok(Verdict::exact(false));
    }
    let violated = sampled_search(&local, cfg, rng, |_, ext, s| !not_above(q.penalty(s, local.total - s), ext));
    Ok(Verdict { holds: Some(!violated), method: Method::Sampled })
}

/// Subset optimality of one community against every other community of the
/// partition and the empty community.
pub(super) fn subset_optimality<R: Rng + ?Sized>(
    g: &Graph,
    set: &NodeSet,
    labels: &[usize],
    sets: &[NodeSet],
    q: &QualityConfig,
    cfg: &VerifyConfig,
    rng: &mut R,
) -> Result<Verdict> {
    let local = Local::new(g, set);
    let own = labels[set.as_slice()[0]];
    // Weight from each local node to each adjacent community.
    let mut targets: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (i, v) in set.iter().enumerate() {
        for (u, w) in g.neighbors(v) {
            let d = labels[u];
            if d != own {
                targets.entry(d).or_insert_with(|| vec![0.0; local.k])[i] += w;
            }
        }
    }
    let target_size: BTreeMap<usize, f64> =
        targets.keys().map(|&d| (d, sets[d].iter().map(|u| g.node_size(u)).sum())).collect();
    if local.k <= exact_limit(cfg) {
        let (weight, size) = local.tables();
        let full = (1usize << local.k) - 1;
        let stay = |s: usize| weight[full] - weight[s] - weight[full ^ s] - q.penalty(size[s], size[full ^ s]);
        if !(1..full).all(|s| not_above(0.0, stay(s))) {
            return Ok(Verdict::exact(false));
        }
        let mut to_d = vec![0.0; full + 1];
        for (d, w) in &targets {
            for mask in 1..=full {
                let low = mask.trailing_zeros() as usize;
                to_d[mask] = to_d[mask & (mask - 1)] + w[low];
            }
            let d_size = target_size[d];
            if !(1..=full).all(|s| not_above(to_d[s] - q.penalty(size[s], d_size), stay(s))) {
                return Ok(Verdict::exact(false));
            }
        }
        return Ok(Verdict::exact(true));
    }
    let violated = sampled_search(&local, cfg, rng, |members, ext, s| {
        let stay = ext - q.penalty(s, local.total - s);
        if !not_above(0.0, stay) {
            return true;
        }
        targets.iter().any(|(d, w)| {
            let e: f64 = members.iter().map(|&i| w[i]).sum();
            !not_above(e - q.penalty(s, target_size[d]), stay)
        })
    });
    if violated {
        Ok(Verdict { holds: Some(false), method: Method::Sampled })
    } else {
        Ok(Verdict::unknown(Method::SkippedTooLarge))
    }
}

/// Looks for a proper subset on which `violates(members, E(S, C - S), ||S||)`
/// holds: single nodes, breadth-first grown sets and random subsets.
fn sampled_search<R: Rng + ?Sized>(
    local: &Local,
    cfg: &VerifyConfig,
    rng: &mut R,
    mut violates: impl FnMut(&[usize], f64, f64) -> bool,
) -> bool {
    let k = local.k;
    for i in 0..k {
        let self_loop: f64 = local.adj[i].iter().filter(|&&(j, _)| j == i).map(|&(_, w)| w).sum();
        if violates(&[i], local.inner_degree[i] - self_loop, local.size[i]) {
            return true;
        }
    }
    let mut in_s = vec![false; k];
    let mut member = vec![false; k];
    let mut members = Vec::with_capacity(k);
    let mut starts: Vec<usize> = (0..k).collect();
    starts.shuffle(rng);
    for &start in starts.iter().take(GROWN_STARTS) {
        in_s.iter_mut().for_each(|x| *x = false);
        member.iter_mut().for_each(|x| *x = false);
        members.clear();
        let (mut ext, mut size) = (0.0, 0.0);
        let mut frontier = alloc::collections::VecDeque::from([start]);
        in_s[start] = true;
        while let Some(v) = frontier.pop_front() {
            members.push(v);
            member[v] = true;
            size += local.size[v];
            for &(u, w) in &local.adj[v] {
                if u == v {
                    continue;
                }
                if member[u] {
                    ext -= w;
                } else {
                    ext += w;
                }
                if !in_s[u] {
                    in_s[u] = true;
                    frontier.push_back(u);
                }
            }
            if members.len() < k && violates(&members, ext, size) {
                return true;
            }
        }
    }
    for _ in 0..cfg.samples {
        let p: f64 = rng.gen_range(0.05..0.95);
        members.clear();
        for (i, flag) in in_s.iter_mut().enumerate() {
            *flag = rng.gen_bool(p);
            if *flag {
                members.push(i);
            }
        }
        if members.is_empty() || members.len() == k {
            continue;
        }
        let mut ext = 0.0;
        let mut size = 0.0;
        for &i in &members {
            size += local.size[i];
            ext += local.adj[i].iter().filter(|&&(j, _)| !in_s[j]).map(|&(_, w)| w).sum::<f64>();
        }
        if violates(&members, ext, size) {
            return true;
        }
    }
    false
}
