use alloc::string::String;

/// Errors reported by graph construction, partition manipulation and the
/// algorithm drivers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("edge ({u}, {v}) has invalid weight {weight}")]
    InvalidWeight { u: usize, v: usize, weight: f64 },
    #[error("node {node} has invalid size {size}")]
    InvalidNodeSize { node: usize, size: f64 },
    #[error("expected {expected} node sizes, got {found}")]
    NodeSizeCount { expected: usize, found: usize },
    #[error("node set must not be empty")]
    EmptyNodeSet,
    #[error("partition covers {found} nodes but the graph has {expected}")]
    PartitionSize { expected: usize, found: usize },
    #[error("community {0} does not exist")]
    UnknownCommunity(usize),
    #[error("node {0} appears in more than one set")]
    OverlappingSets(usize),
    #[error("node set spans more than one community")]
    SetSpansCommunities,
    #[error("resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("visit order lists node {0} twice or out of range")]
    InvalidVisitOrder(usize),
    #[error("modularity is undefined on a graph with zero total edge weight")]
    ZeroTotalWeight,
    #[error("graph has {nodes} nodes, more than the exhaustive limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("inconsistent hierarchy: {0}")]
    InconsistentHierarchy(&'static str),
    #[error("invalid benchmark specification: {0}")]
    InvalidBenchmark(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
