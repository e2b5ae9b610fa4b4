//! Graph and partition domain types.
//!
//! A [`MonolithGraph`] holds the classes of a monolith and the directed call
//! edges between them. A [`Decomposition`] is a proposed grouping of those
//! classes into named services; [`validate_decomposition`] checks it against
//! a graph and produces a [`ValidatedPartition`], which is what every metric
//! and search routine operates on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A class of the monolith. Classes are the unit of decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub id: String,
    /// Free-form metadata. Never read by the metrics.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

impl ClassNode {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            attributes: BTreeMap::new(),
        }
    }
}

/// Provenance of a call edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// A dependency found in the source or bytecode.
    Static,
    /// Calls observed while the monolith was running.
    Runtime,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Static => f.write_str("static"),
            EdgeKind::Runtime => f.write_str("runtime"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallEdge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    /// Number of observed calls; 1 for a plain static dependency.
    pub count: u64,
}

impl CallEdge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, kind: EdgeKind, count: u64) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            kind,
            count,
        }
    }

    pub fn static_dep(src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self::new(src, dst, EdgeKind::Static, 1)
    }

    pub fn is_self_edge(&self) -> bool {
        self.src == self.dst
    }
}

/// Violations of the graph invariants, reported at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("class id must not be empty")]
    EmptyClassId,
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("edge references unknown class `{0}`")]
    UnknownEdgeEndpoint(String),
    #[error("duplicate {kind} edge `{src}` -> `{dst}`")]
    DuplicateEdge { src: String, dst: String, kind: EdgeKind },
    #[error("edge `{src}` -> `{dst}` has count {count}, expected at least 1")]
    BadCount { src: String, dst: String, count: u64 },
}

/// An edge with both endpoints resolved to class indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexedEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
    pub count: u64,
}

impl IndexedEdge {
    pub fn is_self_edge(&self) -> bool {
        self.src == self.dst
    }
}

/// The system under decomposition.
///
/// Classes and edges keep their input order. Construction enforces unique
/// class ids, resolvable endpoints, `count >= 1` and at most one edge per
/// `(src, dst, kind)` triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonolithGraph {
    name: String,
    classes: Vec<ClassNode>,
    edges: Vec<CallEdge>,
    index: HashMap<String, usize>,
    indexed: Vec<IndexedEdge>,
}

impl MonolithGraph {
    pub fn new(name: impl Into<String>, classes: Vec<ClassNode>, edges: Vec<CallEdge>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(classes.len());
        for (i, class) in classes.iter().enumerate() {
            if class.id.is_empty() {
                return Err(GraphError::EmptyClassId);
            }
            if index.insert(class.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateClass(class.id.clone()));
            }
        }

        let mut seen = HashMap::with_capacity(edges.len());
        let mut indexed = Vec::with_capacity(edges.len());
        for edge in &edges {
            let src = *index
                .get(&edge.src)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(edge.src.clone()))?;
            let dst = *index
                .get(&edge.dst)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(edge.dst.clone()))?;
            if edge.count == 0 {
                return Err(GraphError::BadCount {
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                    count: edge.count,
                });
            }
            if seen.insert((src, dst, edge.kind), ()).is_some() {
                return Err(GraphError::DuplicateEdge {
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                    kind: edge.kind,
                });
            }
            indexed.push(IndexedEdge {
                src,
                dst,
                kind: edge.kind,
                count: edge.count,
            });
        }

        Ok(Self {
            name: name.into(),
            classes,
            edges,
            index,
            indexed,
        })
    }

    /// Convenience constructor: classes from ids, one static edge of count 1
    /// per `(src, dst)` pair.
    pub fn from_static_edges<S: AsRef<str>>(
        name: impl Into<String>,
        class_ids: &[S],
        edges: &[(S, S)],
    ) -> Result<Self, GraphError> {
        let classes = class_ids.iter().map(|c| ClassNode::new(c.as_ref())).collect();
        let edges = edges
            .iter()
            .map(|(s, d)| CallEdge::static_dep(s.as_ref(), d.as_ref()))
            .collect();
        Self::new(name, classes, edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classes(&self) -> &[ClassNode] {
        &self.classes
    }

    pub fn edges(&self) -> &[CallEdge] {
        &self.edges
    }

    /// Edges with endpoints as class indices, in the same order as [`edges`](Self::edges).
    pub fn indexed_edges(&self) -> &[IndexedEdge] {
        &self.indexed
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn class_id(&self, index: usize) -> &str {
        &self.classes[index].id
    }

    pub fn has_runtime_edges(&self) -> bool {
        self.indexed.iter().any(|e| e.kind == EdgeKind::Runtime)
    }
}

/// One named service of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Service {
    pub name: String,
    pub classes: Vec<String>,
}

impl Service {
    pub fn new<S: Into<String>>(name: impl Into<String>, classes: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            classes: classes.into_iter().map(Into::into).collect(),
        }
    }
}

/// A proposed grouping of a monolith's classes into services.
///
/// Not guaranteed valid until passed through [`validate_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub tool: String,
    pub system: String,
    pub services: Vec<Service>,
}

impl Decomposition {
    pub fn new(tool: impl Into<String>, system: impl Into<String>, services: Vec<Service>) -> Self {
        Self {
            tool: tool.into(),
            system: system.into(),
            services,
        }
    }

    /// Number of services, the "Micro" column of a comparison table.
    pub fn micro(&self) -> usize {
        self.services.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("service `{service}` references unknown class `{class}`")]
    UnknownClass { service: String, class: String },
    #[error("class `{0}` is not assigned to any service")]
    MissingClass(String),
    #[error("class `{class}` is assigned more than once (service `{service}`)")]
    DuplicateAssignment { class: String, service: String },
    #[error("service `{0}` has no classes")]
    EmptyService(String),
}

/// A decomposition proven total, disjoint and free of empty services
/// against a specific graph.
///
/// Members are class indices into that graph. Service order follows the
/// input decomposition; member order follows the order the classes were
/// listed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedPartition {
    tool: String,
    system: String,
    names: Vec<String>,
    members: Vec<Vec<usize>>,
    assignment: Vec<usize>,
}

impl ValidatedPartition {
    pub fn tool(&self) -> &str {
        &self.tool
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    /// Number of services (M).
    pub fn service_count(&self) -> usize {
        self.members.len()
    }

    pub fn class_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn service_names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self, service: usize) -> &[usize] {
        &self.members[service]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Service index of class `class`.
    pub fn service_of(&self, class: usize) -> usize {
        self.assignment[class]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Rebuilds the plain decomposition, with class ids taken from `graph`.
    pub fn to_decomposition(&self, graph: &MonolithGraph) -> Decomposition {
        let services = self
            .names
            .iter()
            .zip(&self.members)
            .map(|(name, members)| Service {
                name: name.clone(),
                classes: members.iter().map(|&c| graph.class_id(c).to_owned()).collect(),
            })
            .collect();
        Decomposition::new(self.tool.clone(), self.system.clone(), services)
    }

    /// Builds a partition directly from a class-to-block assignment.
    ///
    /// Block labels may be arbitrary; services are numbered in order of first
    /// appearance and named `service-1`, `service-2`, ...
    pub fn from_assignment(tool: impl Into<String>, graph: &MonolithGraph, labels: &[usize]) -> Self {
        assert_eq!(labels.len(), graph.class_count(), "one label per class");
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for (class, &label) in labels.iter().enumerate() {
            let next = relabel.len();
            let service = *relabel.entry(label).or_insert(next);
            if service == members.len() {
                members.push(Vec::new());
            }
            members[service].push(class);
            assignment.push(service);
        }
        let names = (1..=members.len()).map(|i| format!("service-{i}")).collect();
        Self {
            tool: tool.into(),
            system: graph.name().to_owned(),
            names,
            members,
            assignment,
        }
    }
}

/// Checks `decomposition` against `graph` and builds the class-to-service index.
pub fn validate_decomposition(
    graph: &MonolithGraph,
    decomposition: &Decomposition,
) -> Result<ValidatedPartition, PartitionError> {
    let mut assignment: Vec<Option<usize>> = vec![None; graph.class_count()];
    let mut members = Vec::with_capacity(decomposition.services.len());

    for (s, service) in decomposition.services.iter().enumerate() {
        if service.classes.is_empty() {
            return Err(PartitionError::EmptyService(service.name.clone()));
        }
        let mut block = Vec::with_capacity(service.classes.len());
        for class in &service.classes {
            let idx = graph.class_index(class).ok_or_else(|| PartitionError::UnknownClass {
                service: service.name.clone(),
                class: class.clone(),
            })?;
            if assignment[idx].replace(s).is_some() {
                return Err(PartitionError::DuplicateAssignment {
                    class: class.clone(),
                    service: service.name.clone(),
                });
            }
            block.push(idx);
        }
        members.push(block);
    }

    let assignment = assignment
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| PartitionError::MissingClass(graph.class_id(i).to_owned())))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ValidatedPartition {
        tool: decomposition.tool.clone(),
        system: decomposition.system.clone(),
        names: decomposition.services.iter().map(|s| s.name.clone()).collect(),
        members,
        assignment,
    })
}
