//! Evaluation toolkit for monolith-to-microservice decompositions.
//!
//! The crate computes four decomposition quality metrics (structural
//! modularity, interface number, inter-partition communication and
//! non-extreme distribution), standardises them across competing tools into
//! a weighted composite score, and ships baseline decomposers plus a
//! planted-partition generator so the whole pipeline can run on synthetic
//! monoliths.
//!
//! ```
//! use msdecomp_core::{evaluate_all, EdgePolicy, MonolithGraph, Decomposition, Service};
//!
//! let graph = MonolithGraph::from_static_edges(
//!     "g4",
//!     &["A", "B", "C", "D"],
//!     &[("A", "B"), ("B", "C"), ("C", "D")],
//! ).unwrap();
//! let split = Decomposition::new(
//!     "manual",
//!     "g4",
//!     vec![Service::new("left", ["A", "B"]), Service::new("right", ["C", "D"])],
//! );
//! let report = evaluate_all(&graph, &split, &EdgePolicy::default()).unwrap();
//! assert_eq!(report.sm.sm, 0.125);
//! assert_eq!(report.ifn.ifn, 0.5);
//! ```

pub mod decompose;
pub mod fixtures;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod report;
pub mod scoring;

pub use decompose::{
    decompose_hierarchical, decompose_hillclimb, decompose_monolith, decompose_random, decompose_singletons,
    CutCriterion, DecomposeError, HierarchicalParams, HillClimbParams, Linkage,
};
pub use ingest::{
    generate_planted, load_decomposition, load_graph, load_metric_rows, save_decomposition, save_graph,
    save_metric_rows, IngestError, PlantedSpec,
};
pub use metrics::{
    compute_icp, compute_ifn, compute_ned, compute_sm, evaluate_all, evaluate_partition, EdgePolicy, IcpBreakdown,
    IcpSource, IfnBreakdown, MetricError, MetricReport, NedBounds, NedBreakdown, SmBreakdown, SmSource,
};
pub use model::{
    validate_decomposition, CallEdge, ClassNode, Decomposition, EdgeKind, GraphError, MonolithGraph, PartitionError,
    Service, ValidatedPartition,
};
pub use report::{render_report, render_table, RenderFormat};
pub use scoring::{
    composite_scores, rank_table, spearman, zscore_columns, MetricRow, RankedTool, ScoreTable, ScoringError,
    StdConvention, WeightVector, ZMatrix,
};
