use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use community_core::benchgen::{generate_bridge_rich, generate_planted, resolution_for_mu, BenchmarkSpec, BridgeRichSpec};
use community_core::verify::{audit, VerifyConfig};
use community_core::{Graph, Partition, QualityConfig};
use serde_json::json;

use crate::harness::{badly_connected_experiment, run_experiment, Algorithm, RunConfig, Stop, DEFAULT_PATIENCE};
use crate::io::{load_edge_list, write_partition, FormatError};
use crate::report::{write_connectivity_csv, write_iterations_csv, write_report};

/// Louvain and Leiden community detection with CPM and modularity.
#[derive(Debug, Parser)]
#[command(name = "community-detect", version)]
pub struct Args {
    /// Edge list to cluster (`u v [w]` per line).
    #[arg(long, conflicts_with_all = ["bench", "bridge_rich"], required_unless_present_any = ["bench", "bridge_rich"])]
    pub input: Option<PathBuf>,
    /// Planted benchmark, e.g. `n=1000,size=50,k=10,mu=0.3`.
    #[arg(long, conflicts_with = "bridge_rich")]
    pub bench: Option<BenchArg>,
    /// Hub-and-wings gadget graph (default parameters, seeded by --seed).
    #[arg(long)]
    pub bridge_rich: bool,
    /// Treat a third edge-list column as the weight.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub weighted: bool,
    #[arg(long, value_enum, default_value_t = Algorithm::Leiden)]
    pub algorithm: Algorithm,
    #[arg(long, value_enum, default_value_t = QualityArg::Modularity)]
    pub quality: QualityArg,
    /// Resolution. Defaults to 1, or for CPM on a benchmark to the midpoint
    /// of the planted densities.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, default_value_t = community_core::leiden::DEFAULT_THETA)]
    pub theta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `k`, `until-stable` or `until-asymptotic`.
    #[arg(long, default_value = "10")]
    pub iterations: IterationsArg,
    /// Iteration cap for the `until-*` modes.
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    /// Consecutive stable Leiden iterations required by `until-asymptotic`.
    #[arg(long, default_value_t = DEFAULT_PATIENCE)]
    pub patience: usize,
    #[arg(long, value_enum, default_value_t = AuditArg::None)]
    pub audit: AuditArg,
    /// Communities up to this size are audited exactly.
    #[arg(long, default_value_t = community_core::verify::DEFAULT_EXACT_LIMIT)]
    pub exact_limit: usize,
    /// Measure badly connected communities after every iteration.
    #[arg(long)]
    pub badly_connected: bool,
    /// Run both algorithms over this many generated graphs and emit the
    /// connectivity table instead of a single report.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Report path; a CSV table is written next to it. Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QualityArg {
    Cpm,
    Modularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditArg {
    None,
    /// Per-iteration guarantees and node optimality.
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationsArg {
    Fixed(usize),
    UntilStable,
    UntilAsymptotic,
}

impl FromStr for IterationsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "until-stable" => Ok(IterationsArg::UntilStable),
            "until-asymptotic" => Ok(IterationsArg::UntilAsymptotic),
            _ => match s.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(IterationsArg::Fixed(k)),
                _ => Err(format!("expected a positive count, `until-stable` or `until-asymptotic`, found `{s}`")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchArg {
    pub n: usize,
    pub size: usize,
    pub k: f64,
    pub mu: f64,
}

impl FromStr for BenchArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut bench = BenchArg { n: 1000, size: 50, k: 10.0, mu: 0.3 };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, found `{part}`"))?;
            match key.trim() {
                "n" => bench.n = field(key, value)?,
                "size" => bench.size = field(key, value)?,
                "k" => bench.k = field(key, value)?,
                "mu" => bench.mu = field(key, value)?,
                other => return Err(format!("unknown benchmark key `{other}` (expected n, size, k, mu)")),
            }
        }
        Ok(bench)
    }
}

fn field<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("invalid value for {}: `{value}`", key.trim()))
}

impl BenchArg {
    fn spec(&self, seed: u64) -> BenchmarkSpec {
        BenchmarkSpec { n: self.n, community_size: self.size, mean_degree: self.k, mu: self.mu, seed }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: FormatError },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::File { .. } => 1,
        }
    }
}

fn usage(e: impl ToString) -> RunError {
    RunError::Usage(e.to_string())
}

fn file_error(path: &Path, e: impl Into<FormatError>) -> RunError {
    RunError::File { path: path.to_path_buf(), source: e.into() }
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn quality_for(args: &Args, g: &Graph, bench: Option<&BenchmarkSpec>) -> Result<QualityConfig, RunError> {
    match args.quality {
        QualityArg::Modularity => QualityConfig::modularity(args.resolution.unwrap_or(1.0), g).map_err(usage),
        QualityArg::Cpm => {
            let gamma = match (args.resolution, bench) {
                (Some(gamma), _) => gamma,
                (None, Some(spec)) => resolution_for_mu(spec).map_err(usage)?.gamma,
                (None, None) => 1.0,
            };
            QualityConfig::cpm(gamma).map_err(usage)
        }
    }
}

fn stop_for(args: &Args) -> Stop {
    match args.iterations {
        IterationsArg::Fixed(k) => Stop::Iterations(k),
        IterationsArg::UntilStable => Stop::UntilStable { max: args.max_iterations },
        IterationsArg::UntilAsymptotic => Stop::UntilAsymptotic { max: args.max_iterations, patience: args.patience },
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|e| file_error(path, e))
}

fn execute(args: &Args) -> Result<(), RunError> {
    if let Some(r) = args.replications {
        return connectivity_table(args, r);
    }
    let (graph, truth, source, spec) = match (&args.input, &args.bench) {
        _ if args.bridge_rich => {
            let spec = BridgeRichSpec::new(args.seed);
            let gadgets = generate_bridge_rich(&spec).map_err(usage)?;
            (gadgets.graph, None, json!({ "bridge_rich": spec }), None)
        }
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| file_error(path, e))?;
            let g = load_edge_list(BufReader::new(file), args.weighted).map_err(|e| file_error(path, e))?;
            (g, None, json!({ "input": path.display().to_string() }), None)
        }
        (None, Some(bench)) => {
            let spec = bench.spec(args.seed);
            let planted = generate_planted(&spec).map_err(usage)?;
            let rule = resolution_for_mu(&spec).map_err(usage)?;
            let source = json!({ "benchmark": spec, "resolution_rule": rule });
            (planted.graph, Some(planted.truth), source, Some(spec))
        }
        (None, None) => return Err(usage("one of --input or --bench is required")),
    };
    let quality = quality_for(args, &graph, spec.as_ref())?;
    let cfg = RunConfig {
        algorithm: args.algorithm,
        quality,
        theta: args.theta,
        seed: args.seed,
        measure_badly_connected: args.badly_connected,
    };
    let (report, partition) = run_experiment(&graph, &cfg, stop_for(args), truth.as_ref()).map_err(usage)?;
    let guarantees = match args.audit {
        AuditArg::None => None,
        mode => {
            let prepared = quality.prepare(&graph).map_err(usage)?;
            let verify = VerifyConfig { exact_limit: args.exact_limit, seed: args.seed, full: mode == AuditArg::Full, ..VerifyConfig::default() };
            Some(audit(&prepared, &partition, &quality, &verify).map_err(usage)?)
        }
    };
    match &args.output {
        Some(path) => {
            let mut out = create(path)?;
            write_report(&report, source, guarantees.as_ref(), &mut out).map_err(|e| file_error(path, e))?;
            out.flush().map_err(|e| file_error(path, e))?;
            let csv = path.with_extension("csv");
            let mut out = create(&csv)?;
            write_iterations_csv(&report, &mut out).and_then(|_| out.flush()).map_err(|e| file_error(&csv, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            write_report(&report, source, guarantees.as_ref(), stdout.lock()).map_err(|e| file_error(Path::new("-"), e))?;
        }
    }
    if let Some(path) = &args.partition_out {
        write_partition_file(&partition, path)?;
    }
    Ok(())
}

fn write_partition_file(p: &Partition, path: &Path) -> Result<(), RunError> {
    let mut out = create(path)?;
    write_partition(p, &mut out).and_then(|_| out.flush()).map_err(|e| file_error(path, e))
}

fn connectivity_table(args: &Args, replications: usize) -> Result<(), RunError> {
    let bench = args.bench;
    if bench.is_none() && !args.bridge_rich {
        return Err(usage("--replications needs --bench or --bridge-rich"));
    }
    let iterations = match args.iterations {
        IterationsArg::Fixed(k) => k,
        _ => return Err(usage("--replications needs a fixed --iterations count")),
    };
    if replications == 0 {
        return Err(usage("--replications must be at least 1"));
    }
    let rows = badly_connected_experiment(
        |seed| match bench {
            Some(bench) => generate_planted(&bench.spec(seed)).map(|p| p.graph),
            None => generate_bridge_rich(&BridgeRichSpec::new(seed)).map(|b| b.graph),
        },
        |g| match args.quality {
            QualityArg::Modularity => QualityConfig::modularity(args.resolution.unwrap_or(1.0), g),
            QualityArg::Cpm => QualityConfig::cpm(args.resolution.unwrap_or(1.0)),
        },
        args.theta,
        replications,
        iterations,
        args.seed,
    )
    .map_err(usage)?;
    match &args.output {
        Some(path) => {
            let mut out = create(path)?;
            write_connectivity_csv(&rows, &mut out).and_then(|_| out.flush()).map_err(|e| file_error(path, e))
        }
        None => write_connectivity_csv(&rows, std::io::stdout().lock()).map_err(|e| file_error(Path::new("-"), e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_edge_list;
    use crate::report::without_timing;
    use community_core::fixtures::appendix_c;

    fn lines(path: &Path) -> Vec<serde_json::Value> {
        std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
    }

    fn records<'a>(doc: &'a [serde_json::Value], kind: &str) -> Vec<&'a serde_json::Value> {
        doc.iter().filter(|v| v["record"] == kind).collect()
    }

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("community-detect").chain(args.iter().copied()))
    }

    fn appendix_c_file(dir: &Path) -> PathBuf {
        let path = dir.join("appendix_c.txt");
        write_edge_list(&appendix_c().graph, File::create(&path).unwrap()).unwrap();
        path
    }

    #[test]
    fn louvain_on_appendix_c_stops_at_fourteen() {
        let dir = tempfile::tempdir().unwrap();
        let input = appendix_c_file(dir.path());
        let out = dir.path().join("report.jsonl");
        let parts = dir.path().join("partition.txt");
        let code = run_args(&[
            "--input", input.to_str().unwrap(), "--algorithm", "louvain", "--quality", "cpm", "--resolution", "1",
            "--iterations", "until-stable", "--output", out.to_str().unwrap(), "--partition-out", parts.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let doc = lines(&out);
        assert_eq!(doc[0]["format"], FORMAT_NAME);
        let summary = &records(&doc, "summary")[0]["summary"];
        assert_eq!(summary["final_quality"], 14.0);
        assert_eq!(summary["converged"], true);
        assert!(out.with_extension("csv").exists());
        let labels = crate::io::read_partition(BufReader::new(File::open(&parts).unwrap()), 8).unwrap();
        assert_eq!(labels.community_count(), 3);
    }

    const FORMAT_NAME: &str = crate::report::FORMAT;

    #[test]
    fn benchmark_report_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut texts = Vec::new();
        for name in ["a.jsonl", "b.jsonl"] {
            let out = dir.path().join(name);
            let code = run_args(&[
                "--bench", "n=1000,size=50,k=10,mu=0.3", "--algorithm", "leiden", "--quality", "cpm", "--iterations", "2",
                "--seed", "7", "--output", out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
            let doc = lines(&out);
            assert_eq!(records(&doc, "iteration").len(), 2);
            assert!(records(&doc, "iteration").iter().all(|r| r["matches_truth"].is_boolean()));
            assert!(records(&doc, "summary")[0]["summary"]["recovered_planted"].is_boolean());
            texts.push(without_timing(&std::fs::read_to_string(&out).unwrap()));
        }
        assert_eq!(texts[0], texts[1]);
        assert!(!texts[0].contains("elapsed_ms"));
    }

    #[test]
    fn full_audit_of_leiden_is_gamma_connected() {
        let dir = tempfile::tempdir().unwrap();
        let input = appendix_c_file(dir.path());
        let out = dir.path().join("report.jsonl");
        let code = run_args(&[
            "--input", input.to_str().unwrap(), "--quality", "cpm", "--resolution", "1", "--iterations", "until-asymptotic",
            "--audit", "full", "--output", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let doc = lines(&out);
        let audit = &records(&doc, "audit")[0]["guarantees"];
        assert_eq!(audit["connected"], true);
        assert_eq!(audit["gamma_connected"], true);
        assert_eq!(audit["gamma_separated"], true);
        assert!(audit["bound"].is_object());
    }

    #[test]
    fn connectivity_table_has_a_row_per_algorithm_and_iteration() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("table.csv");
        let code = run_args(&["--bridge-rich", "--replications", "1", "--iterations", "2", "--output", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("louvain,1,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["--bench", "n=100", "--no-such-flag"]), 2);
        assert_eq!(run_args(&[]), 2);
        assert_eq!(run_args(&["--bench", "n=100,zeta=3"]), 2);
        assert_eq!(run_args(&["--bench", "n=100", "--iterations", "0"]), 2);
        assert_eq!(run_args(&["--input", "/nonexistent/graph.txt"]), 1);
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "0 1\n2 x\n").unwrap();
        assert_eq!(run_args(&["--input", bad.to_str().unwrap()]), 1);
        assert_eq!(run_args(&["--input", bad.to_str().unwrap(), "--replications", "2"]), 2);
    }

    #[test]
    fn bench_arg_parsing() {
        let b: BenchArg = "n=200, mu=0.5".parse().unwrap();
        assert_eq!(b, BenchArg { n: 200, size: 50, k: 10.0, mu: 0.5 });
        assert!("n".parse::<BenchArg>().is_err());
        assert!("k=ten".parse::<BenchArg>().is_err());
        assert_eq!("until-stable".parse::<IterationsArg>(), Ok(IterationsArg::UntilStable));
        assert_eq!("4".parse::<IterationsArg>(), Ok(IterationsArg::Fixed(4)));
    }
}
