//! Edge-list and partition text formats.
//!
//! Edge lists hold one undirected edge per line, `u v` or `u v w`, with
//! whitespace separators and `#` comment lines. Partitions hold one line per
//! node, `node<TAB>community`, with canonical community labels.

use std::io::{BufRead, Write};

use community_core::{CanonicalLabels, Graph, Partition};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] community_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Reads an edge list. Without `weighted`, a third column is ignored and
/// every edge has weight 1. Node ids up to the largest one seen all exist,
/// isolated or not; repeated edges add up.
pub fn load_edge_list(reader: impl BufRead, weighted: bool) -> Result<Graph, FormatError> {
    let mut edges = Vec::new();
    let mut node_count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let number = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_error(number, format!("expected `u v` or `u v w`, found {} fields", fields.len())));
        }
        let node = |s: &str| s.parse::<usize>().map_err(|_| parse_error(number, format!("invalid node id `{s}`")));
        let (u, v) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            Some(s) if weighted => {
                let w: f64 = s.parse().map_err(|_| parse_error(number, format!("invalid weight `{s}`")))?;
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(parse_error(number, format!("weight must be non-negative, found {w}")));
                }
                w
            }
            _ => 1.0,
        };
        node_count = node_count.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Ok(Graph::from_edges(node_count, edges)?)
}

pub fn write_edge_list(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# {} nodes, {} edges", g.node_count(), g.edge_count())?;
    let weighted = g.edges().any(|(_, _, w)| w != 1.0);
    for (u, v, w) in g.edges() {
        if weighted {
            writeln!(out, "{u} {v} {w}")?;
        } else {
            writeln!(out, "{u} {v}")?;
        }
    }
    Ok(())
}

pub fn write_partition(p: &Partition, mut out: impl Write) -> std::io::Result<()> {
    for (v, c) in p.canonical_form().as_slice().iter().enumerate() {
        writeln!(out, "{v}\t{c}")?;
    }
    Ok(())
}

/// Reads a partition file for a graph with `node_count` nodes. Every node
/// must appear exactly once.
pub fn read_partition(reader: impl BufRead, node_count: usize) -> Result<CanonicalLabels, FormatError> {
    let mut labels = vec![usize::MAX; node_count];
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let number = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = text.split_whitespace();
        let mut next = |what: &str| {
            fields
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| parse_error(number, format!("missing or invalid {what}")))
        };
        let (v, c) = (next("node id")?, next("community id")?);
        if v >= node_count {
            return Err(parse_error(number, format!("node {v} out of range")));
        }
        if labels[v] != usize::MAX {
            return Err(parse_error(number, format!("node {v} listed twice")));
        }
        labels[v] = c;
    }
    if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(parse_error(0, format!("node {v} has no community")));
    }
    Ok(CanonicalLabels::from_labels(&labels))
}
