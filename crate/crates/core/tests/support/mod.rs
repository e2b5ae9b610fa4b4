#![allow(dead_code)]

pub mod oracle;

use msdecomp_core::{CallEdge, ClassNode, EdgeKind, MonolithGraph};
use oracle::RawEdge;
use rand::Rng;

pub fn g4() -> MonolithGraph {
    MonolithGraph::from_static_edges("g4", &["A", "B", "C", "D"], &[("A", "B"), ("B", "C"), ("C", "D")]).unwrap()
}

pub fn raw_edges(graph: &MonolithGraph) -> Vec<RawEdge> {
    graph
        .edges()
        .iter()
        .map(|e| RawEdge {
            src: graph.class_index(&e.src).unwrap(),
            dst: graph.class_index(&e.dst).unwrap(),
            runtime: e.kind == EdgeKind::Runtime,
            count: e.count,
        })
        .collect()
}

/// Random graph on `n` classes: each ordered pair (self pairs included) gets
/// a static edge with probability `density`, and optionally a runtime edge.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64, runtime: bool) -> MonolithGraph {
    let ids: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.random::<f64>() < density {
                edges.push(CallEdge::static_dep(&ids[u], &ids[v]));
            }
            if runtime && rng.random::<f64>() < density {
                edges.push(CallEdge::new(
                    &ids[u],
                    &ids[v],
                    EdgeKind::Runtime,
                    rng.random_range(1..20),
                ));
            }
        }
    }
    MonolithGraph::new("random", ids.into_iter().map(ClassNode::new).collect(), edges).unwrap()
}

/// Random labelling of `n` classes into at most `n` blocks.
pub fn random_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let k = rng.random_range(1..=n);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

pub fn labels_of(graph: &MonolithGraph, d: &msdecomp_core::Decomposition) -> Vec<usize> {
    let mut labels = vec![usize::MAX; graph.class_count()];
    for (s, service) in d.services.iter().enumerate() {
        for c in &service.classes {
            labels[graph.class_index(c).unwrap()] = s;
        }
    }
    labels
}
