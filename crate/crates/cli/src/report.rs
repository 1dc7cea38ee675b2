//! Report emission: a JSON-lines document with a versioned header, and CSV
//! tables for plotting.
//!
//! Every report line is one JSON object with a `record` tag: one `header`,
//! one `iteration` per iteration, an optional `audit`, and a closing
//! `summary`. Only `elapsed_ms` depends on timing.

use std::io::Write;

use community_core::verify::GuaranteeReport;
use serde::Serialize;
use serde_json::json;

use crate::harness::{ConnectivityRow, ExperimentReport};

pub const FORMAT: &str = "community-detect-report";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub iterations: usize,
    pub converged: bool,
    pub total_visits: u64,
    pub final_quality: f64,
    pub final_quality_per_2m: f64,
    pub communities: usize,
    pub recovered_planted: Option<bool>,
}

pub fn summary(report: &ExperimentReport) -> Summary {
    let last = report.last();
    Summary {
        iterations: report.iterations.len(),
        converged: report.converged,
        total_visits: report.total_visits,
        final_quality: last.quality,
        final_quality_per_2m: last.quality_per_2m,
        communities: last.communities,
        recovered_planted: last.matches_truth,
    }
}

/// Writes the full report. `extra` is merged into the header (input source,
/// benchmark parameters and the like).
pub fn write_report(
    report: &ExperimentReport,
    extra: serde_json::Value,
    audit: Option<&GuaranteeReport>,
    mut out: impl Write,
) -> std::io::Result<()> {
    let line = |out: &mut dyn Write, value: serde_json::Value| -> std::io::Result<()> {
        serde_json::to_writer(&mut *out, &value)?;
        writeln!(out)
    };
    line(&mut out, json!({ "record": "header", "format": FORMAT, "version": VERSION, "run": report.metadata, "source": extra }))?;
    for rec in &report.iterations {
        let mut value = serde_json::to_value(rec)?;
        value["record"] = json!("iteration");
        line(&mut out, value)?;
    }
    if let Some(audit) = audit {
        line(&mut out, json!({ "record": "audit", "guarantees": audit }))?;
    }
    line(&mut out, json!({ "record": "summary", "summary": summary(report) }))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_iterations_csv(report: &ExperimentReport, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "iteration,quality,quality_per_2m,modularity,elapsed_ms,visits,moves,levels,communities,percent_disconnected,percent_badly_connected,stable,matches_truth"
    )?;
    for r in &report.iterations {
        writeln!(
            out,
            "{},{},{},{},{:.3},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.quality,
            r.quality_per_2m,
            opt(r.modularity),
            r.elapsed_ms,
            r.visits,
            r.moves,
            r.levels,
            r.communities,
            r.percent_disconnected,
            opt(r.percent_badly_connected),
            r.stable,
            opt(r.matches_truth)
        )?;
    }
    Ok(())
}

pub fn write_connectivity_csv(rows: &[ConnectivityRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "algorithm,iteration,percent_disconnected,percent_badly_connected,replications")?;
    for r in rows {
        let name = serde_json::to_value(r.algorithm)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            name.as_str().unwrap_or_default(),
            r.iteration,
            r.percent_disconnected,
            r.percent_badly_connected,
            r.replications
        )?;
    }
    Ok(())
}

/// The report with timing fields removed, for determinism comparisons.
pub fn without_timing(report_text: &str) -> String {
    report_text
        .lines()
        .map(|line| match serde_json::from_str::<serde_json::Value>(line) {
            Ok(mut value) => {
                if let Some(obj) = value.as_object_mut() {
                    obj.remove("elapsed_ms");
                }
                value.to_string()
            }
            Err(_) => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}
