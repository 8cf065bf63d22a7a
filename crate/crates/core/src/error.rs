use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by graph primitives, measures and strategies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("graph has {0} nodes; at least 2 are required")]
    TooSmall(usize),
    #[error("node {0} is isolated; random walks need every degree >= 1")]
    IsolatedNode(usize),
    #[error("no non-adjacent node pair remains")]
    CompleteGraph,
    #[error("measure vector has length {got}, graph has {expected} nodes")]
    StaleMeasures { expected: usize, got: usize },
    #[error("budget of {budget} edges exceeds the {capacity} non-adjacent pairs available")]
    BudgetExceedsCapacity { budget: usize, capacity: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Errors raised while reading or writing graph files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("no valid route rows found")]
    EmptyNetwork,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Errors from the experiment driver, tagged with the failing cell.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("model {model}, instance {instance}: {source}")]
    Generation {
        model: String,
        instance: usize,
        #[source]
        source: GraphError,
    },
    #[error("model {model}, strategy {strategy}, instance {instance}: {source}")]
    Strategy {
        model: String,
        strategy: String,
        instance: usize,
        #[source]
        source: GraphError,
    },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("no trajectories to aggregate")]
    EmptyInput,
    #[error("{0}")]
    InsufficientData(String),
}
