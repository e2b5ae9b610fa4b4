//! Baseline decomposers.
//!
//! These produce candidate decompositions from a [`MonolithGraph`] so the
//! evaluation pipeline can run without external tools:
//!
//! - [`decompose_monolith`] and [`decompose_singletons`], the two degenerate extremes;
//! - [`decompose_random`], a seeded control;
//! - [`decompose_hillclimb`], steepest-ascent relocation search maximising SM;
//! - [`decompose_hierarchical`], agglomerative clustering on call-profile similarity.
//!
//! All of them are deterministic for a fixed input and seed, and every output
//! validates against its input graph.

mod baseline;
mod hierarchical;
mod hillclimb;

pub use baseline::{decompose_monolith, decompose_random, decompose_singletons, random_labels};
pub use hierarchical::{decompose_hierarchical, CutCriterion, HierarchicalParams, Linkage};
pub use hillclimb::{decompose_hillclimb, HillClimbParams};

use thiserror::Error;

use crate::model::{Decomposition, MonolithGraph, ValidatedPartition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error("graph has no classes")]
    EmptyGraph,
    #[error("service count {k} outside 1..={classes}")]
    BadK { k: usize, classes: usize },
    #[error(
        "service-count bounds min={} max={} cannot be met with {classes} classes",
        bound(min),
        bound(max)
    )]
    InfeasibleBounds {
        min: Option<usize>,
        max: Option<usize>,
        classes: usize,
    },
    #[error("distance threshold {0} outside (0, 1]")]
    BadThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

fn bound(b: &Option<usize>) -> String {
    b.map_or_else(|| "unset".to_owned(), |v| v.to_string())
}

fn require_classes(graph: &MonolithGraph) -> Result<(), DecomposeError> {
    if graph.is_empty() {
        Err(DecomposeError::EmptyGraph)
    } else {
        Ok(())
    }
}

/// Turns a per-class label vector into a decomposition. Services are named
/// `service-1`, `service-2`, ... in order of their lowest class index.
pub(crate) fn labels_to_decomposition(tool: &str, graph: &MonolithGraph, labels: &[usize]) -> Decomposition {
    ValidatedPartition::from_assignment(tool, graph, labels).to_decomposition(graph)
}
