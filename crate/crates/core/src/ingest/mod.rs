//! Loading and saving graphs, decompositions and metric tables, plus the
//! planted-partition generator used to synthesise test monoliths.
//!
//! Graph and decomposition documents are JSON:
//!
//! ```text
//! { "name": "...", "classes": [{"id": "..."}],
//!   "edges": [{"src": "...", "dst": "...", "kind": "static"|"runtime", "count": 1}] }
//!
//! { "tool": "...", "system": "...", "services": [{"name": "...", "classes": ["..."]}] }
//! ```
//!
//! Metric tables are CSV with header `tool,sm,ifn,icp,ned[,micro]`.
//! Unknown fields and columns are ignored with a warning.

mod documents;
mod metric_table;
mod planted;

pub use documents::{load_decomposition, load_graph, save_decomposition, save_graph};
pub use metric_table::{load_metric_rows, save_metric_rows};
pub use planted::{generate_planted, PlantedSpec};

use thiserror::Error;

use crate::model::{GraphError, PartitionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge `{src}` -> `{dst}` has count {count}, expected at least 1")]
    BadCount { src: String, dst: String, count: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("line {line}: column `{column}` holds non-numeric value `{value}`")]
    NonNumericCell { line: usize, column: String, value: String },
    #[error("metric table has no data rows")]
    EmptyTable,
    #[error("invalid planted-partition spec: {0}")]
    BadSpec(String),
}

impl IngestError {
    /// Short variant name, used for CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::Parse { .. } => "ParseError",
            IngestError::BadCount { .. } => "BadCount",
            IngestError::Graph(GraphError::EmptyClassId) => "EmptyClassId",
            IngestError::Graph(GraphError::DuplicateClass(_)) => "DuplicateClass",
            IngestError::Graph(GraphError::UnknownEdgeEndpoint(_)) => "UnknownEdgeEndpoint",
            IngestError::Graph(GraphError::DuplicateEdge { .. }) => "DuplicateEdge",
            IngestError::Graph(GraphError::BadCount { .. }) => "BadCount",
            IngestError::Partition(PartitionError::UnknownClass { .. }) => "UnknownClass",
            IngestError::Partition(PartitionError::MissingClass(_)) => "MissingClass",
            IngestError::Partition(PartitionError::DuplicateAssignment { .. }) => "DuplicateAssignment",
            IngestError::Partition(PartitionError::EmptyService(_)) => "EmptyService",
            IngestError::NonNumericCell { .. } => "NonNumericCell",
            IngestError::EmptyTable => "EmptyTable",
            IngestError::BadSpec(_) => "BadSpec",
        }
    }
}

impl From<serde_json::Error> for IngestError {
    fn from(e: serde_json::Error) -> Self {
        IngestError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
