//! Repeated algorithm iterations with per-iteration measurements, and the
//! badly-connected-community experiment.

use std::time::Instant;

use community_core::leiden::leiden_iteration_with;
use community_core::louvain::louvain_iteration_with;
use community_core::quality::quality;
use community_core::verify::detect_badly_connected;
use community_core::{
    seeded_rng, Graph, LeidenConfig, LouvainConfig, Partition, QualityConfig, QualityKind, Result, RunStats,
};
use rayon::prelude::*;
use serde::Serialize;

pub const THREADS_ENV: &str = "COMMUNITY_DETECT_THREADS";
pub const DEFAULT_PATIENCE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Louvain,
    Leiden,
}

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stop {
    /// Exactly this many iterations.
    Iterations(usize),
    /// Until an iteration returns its input unchanged.
    UntilStable { max: usize },
    /// Louvain: until stable. Leiden: until `patience` consecutive iterations
    /// are stable.
    UntilAsymptotic { max: usize, patience: usize },
}

impl Stop {
    fn max(&self) -> usize {
        match *self {
            Stop::Iterations(k) => k,
            Stop::UntilStable { max } | Stop::UntilAsymptotic { max, .. } => max,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub quality: QualityConfig,
    pub theta: f64,
    pub seed: u64,
    /// Measure the badly-connected share after every iteration (runs Leiden
    /// on every community's subgraph).
    pub measure_badly_connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Unified-form quality.
    pub quality: f64,
    /// Quality divided by twice the total edge weight.
    pub quality_per_2m: f64,
    /// Newman modularity, for modularity runs.
    pub modularity: Option<f64>,
    pub elapsed_ms: f64,
    pub visits: u64,
    pub moves: u64,
    pub levels: usize,
    pub communities: usize,
    pub percent_disconnected: f64,
    pub percent_badly_connected: Option<f64>,
    pub stable: bool,
    pub matches_truth: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub algorithm: Algorithm,
    pub quality: QualityKind,
    pub gamma: f64,
    pub theta: Option<f64>,
    pub seed: u64,
    pub stop: Stop,
    pub graph: GraphSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub metadata: RunMetadata,
    pub iterations: Vec<IterationRecord>,
    /// Whether the stop condition was met before the iteration cap.
    pub converged: bool,
    pub total_visits: u64,
}

impl ExperimentReport {
    pub fn last(&self) -> &IterationRecord {
        self.iterations.last().expect("at least one iteration")
    }
}

/// Runs iterations of one algorithm on `base`, each starting from the
/// previous result. `truth` enables the ground-truth match flag.
pub fn run_experiment(
    base: &Graph,
    cfg: &RunConfig,
    stop: Stop,
    truth: Option<&Partition>,
) -> Result<(ExperimentReport, Partition)> {
    let g = cfg.quality.prepare(base)?;
    let two_m = 2.0 * base.total_edge_weight();
    let mut rng = seeded_rng(cfg.seed);
    let leiden = LeidenConfig::new(cfg.quality, cfg.seed).with_theta(cfg.theta)?;
    let louvain = LouvainConfig::new(cfg.quality, cfg.seed);
    let mut p = Partition::singleton(&g);
    let mut records = Vec::new();
    let mut stable_run = 0;
    let mut converged = matches!(stop, Stop::Iterations(_));
    let mut total_visits = 0;
    let start = Instant::now();
    for iteration in 1..=stop.max().max(1) {
        let outcome = match cfg.algorithm {
            Algorithm::Louvain => louvain_iteration_with(&g, &p, &louvain, &mut rng)?,
            Algorithm::Leiden => leiden_iteration_with(&g, &p, &leiden, &mut rng)?,
        };
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let stable = outcome.partition == p;
        p = outcome.partition;
        total_visits += outcome.stats.total_visits();
        let record = measure(&g, &p, cfg, iteration, elapsed_ms, outcome.stats, stable, two_m, truth)?;
        records.push(record);
        stable_run = if stable { stable_run + 1 } else { 0 };
        let done = match stop {
            Stop::Iterations(_) => false,
            Stop::UntilStable { .. } => stable,
            Stop::UntilAsymptotic { patience, .. } => match cfg.algorithm {
                Algorithm::Louvain => stable,
                Algorithm::Leiden => stable_run >= patience.max(1),
            },
        };
        if done {
            converged = true;
            break;
        }
    }
    let metadata = RunMetadata {
        algorithm: cfg.algorithm,
        quality: cfg.quality.kind(),
        gamma: cfg.quality.gamma(),
        theta: (cfg.algorithm == Algorithm::Leiden).then_some(cfg.theta),
        seed: cfg.seed,
        stop,
        graph: GraphSummary { nodes: base.node_count(), edges: base.edge_count(), total_weight: base.total_edge_weight() },
    };
    Ok((ExperimentReport { metadata, iterations: records, converged, total_visits }, p))
}

/// Leiden iterated until `patience` consecutive stable iterations.
pub fn iterate_until_asymptotic(base: &Graph, cfg: &RunConfig, max_iters: usize) -> Result<(ExperimentReport, Partition)> {
    run_experiment(base, cfg, Stop::UntilAsymptotic { max: max_iters, patience: DEFAULT_PATIENCE }, None)
}

#[allow(clippy::too_many_arguments)]
fn measure(
    g: &Graph,
    p: &Partition,
    cfg: &RunConfig,
    iteration: usize,
    elapsed_ms: f64,
    stats: RunStats,
    stable: bool,
    two_m: f64,
    truth: Option<&Partition>,
) -> Result<IterationRecord> {
    let h = quality(g, p, &cfg.quality)?;
    let sets = p.node_sets();
    let disconnected = sets.iter().filter(|s| !is_connected(g, s)).count();
    let percent_badly_connected = if cfg.measure_badly_connected {
        let leiden = LeidenConfig::new(cfg.quality, cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(iteration as u64)).with_theta(cfg.theta)?;
        Some(detect_badly_connected(g, p, &leiden)?.percent_badly_connected)
    } else {
        None
    };
    Ok(IterationRecord {
        iteration,
        quality: h,
        quality_per_2m: if two_m > 0.0 { h / two_m } else { 0.0 },
        modularity: cfg.quality.standard_modularity(h),
        elapsed_ms,
        visits: stats.total_visits(),
        moves: stats.moves,
        levels: stats.levels,
        communities: p.community_count(),
        percent_disconnected: 100.0 * disconnected as f64 / sets.len().max(1) as f64,
        percent_badly_connected,
        stable,
        matches_truth: truth.map(|t| t == p),
    })
}

fn is_connected(g: &Graph, set: &community_core::NodeSet) -> bool {
    if set.len() <= 1 {
        return true;
    }
    match g.induced_subgraph(set) {
        Ok((sub, _)) => sub.connected_components().len() == 1,
        Err(_) => false,
    }
}

/// One row of the badly-connected table: means over replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityRow {
    pub algorithm: Algorithm,
    pub iteration: usize,
    pub percent_disconnected: f64,
    pub percent_badly_connected: f64,
    pub replications: usize,
}

/// Runs both algorithms for `iterations` iterations in each of
/// `replications` replications (seeds `seed`, `seed + 1`, ...), measuring
/// disconnected and badly connected communities after each iteration.
/// `graph_for` supplies the graph of each replication.
pub fn badly_connected_experiment<F>(
    graph_for: F,
    quality: impl Fn(&Graph) -> Result<QualityConfig> + Sync,
    theta: f64,
    replications: usize,
    iterations: usize,
    seed: u64,
) -> Result<Vec<ConnectivityRow>>
where
    F: Fn(u64) -> Result<Graph> + Sync,
{
    let runs: Result<Vec<Vec<(Algorithm, IterationRecord)>>> = with_thread_pool(|| {
        (0..replications as u64)
            .into_par_iter()
            .map(|r| {
                let g = graph_for(seed + r)?;
                let q = quality(&g)?;
                let mut records = Vec::new();
                for algorithm in [Algorithm::Louvain, Algorithm::Leiden] {
                    let cfg = RunConfig { algorithm, quality: q, theta, seed: seed + r, measure_badly_connected: true };
                    let (report, _) = run_experiment(&g, &cfg, Stop::Iterations(iterations), None)?;
                    records.extend(report.iterations.into_iter().map(|rec| (algorithm, rec)));
                }
                Ok(records)
            })
            .collect()
    });
    let runs = runs?;
    let mut rows = Vec::new();
    for algorithm in [Algorithm::Louvain, Algorithm::Leiden] {
        for iteration in 1..=iterations {
            let recs: Vec<&IterationRecord> = runs
                .iter()
                .flatten()
                .filter(|(a, r)| *a == algorithm && r.iteration == iteration)
                .map(|(_, r)| r)
                .collect();
            let n = recs.len().max(1) as f64;
            rows.push(ConnectivityRow {
                algorithm,
                iteration,
                percent_disconnected: recs.iter().map(|r| r.percent_disconnected).sum::<f64>() / n,
                percent_badly_connected: recs.iter().filter_map(|r| r.percent_badly_connected).sum::<f64>() / n,
                replications: recs.len(),
            });
        }
    }
    Ok(rows)
}

/// Runs `f` on a pool capped by the thread environment variable, or on the
/// global pool when it is unset or invalid.
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()).filter(|&t| t > 0);
    match threads.and_then(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
