use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::IngestError;
use crate::model::{validate_decomposition, CallEdge, ClassNode, Decomposition, EdgeKind, MonolithGraph, Service};

type Extra = BTreeMap<String, Value>;

fn warn_unknown(what: &str, extra: &Extra) {
    for key in extra.keys() {
        log::warn!("ignoring unknown field `{key}` in {what}");
    }
}

#[derive(Deserialize)]
struct GraphIn {
    name: String,
    classes: Vec<ClassIn>,
    #[serde(default)]
    edges: Vec<EdgeIn>,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Deserialize)]
struct ClassIn {
    id: String,
    #[serde(default)]
    attributes: BTreeMap<String, String>,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Deserialize)]
struct EdgeIn {
    src: String,
    dst: String,
    kind: EdgeKind,
    #[serde(default = "one")]
    count: i64,
    #[serde(flatten)]
    extra: Extra,
}

fn one() -> i64 {
    1
}

#[derive(Serialize)]
struct GraphOut<'a> {
    name: &'a str,
    classes: &'a [ClassNode],
    edges: &'a [CallEdge],
}

#[derive(Deserialize)]
struct DecompositionIn {
    tool: String,
    system: String,
    services: Vec<ServiceIn>,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Deserialize)]
struct ServiceIn {
    name: String,
    classes: Vec<String>,
    #[serde(flatten)]
    extra: Extra,
}

/// Parses a graph document and enforces every graph invariant.
pub fn load_graph(document: &str) -> Result<MonolithGraph, IngestError> {
    let doc: GraphIn = serde_json::from_str(document)?;
    warn_unknown("graph document", &doc.extra);

    let classes = doc
        .classes
        .into_iter()
        .map(|c| {
            warn_unknown("class entry", &c.extra);
            ClassNode {
                id: c.id,
                attributes: c.attributes,
            }
        })
        .collect();
    let edges = doc
        .edges
        .into_iter()
        .map(|e| {
            warn_unknown("edge entry", &e.extra);
            if e.count < 1 {
                return Err(IngestError::BadCount {
                    src: e.src,
                    dst: e.dst,
                    count: e.count,
                });
            }
            Ok(CallEdge::new(e.src, e.dst, e.kind, e.count as u64))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(MonolithGraph::new(doc.name, classes, edges)?)
}

/// Pretty-printed graph document with a trailing newline.
pub fn save_graph(graph: &MonolithGraph) -> String {
    let out = GraphOut {
        name: graph.name(),
        classes: graph.classes(),
        edges: graph.edges(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("graph serialises");
    s.push('\n');
    s
}

/// Parses a decomposition document and validates it against `graph`.
pub fn load_decomposition(document: &str, graph: &MonolithGraph) -> Result<Decomposition, IngestError> {
    let doc: DecompositionIn = serde_json::from_str(document)?;
    warn_unknown("decomposition document", &doc.extra);
    let services = doc
        .services
        .into_iter()
        .map(|s| {
            warn_unknown("service entry", &s.extra);
            Service {
                name: s.name,
                classes: s.classes,
            }
        })
        .collect();
    let decomposition = Decomposition::new(doc.tool, doc.system, services);
    validate_decomposition(graph, &decomposition)?;
    Ok(decomposition)
}

pub fn save_decomposition(decomposition: &Decomposition) -> String {
    let mut s = serde_json::to_string_pretty(decomposition).expect("decomposition serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GraphError, PartitionError};

    const G4: &str = r#"{
        "name": "g4",
        "classes": [{"id": "A"}, {"id": "B"}, {"id": "C"}, {"id": "D"}],
        "edges": [
            {"src": "A", "dst": "B", "kind": "static", "count": 1},
            {"src": "B", "dst": "C", "kind": "static", "count": 1},
            {"src": "C", "dst": "D", "kind": "static", "count": 1}
        ]
    }"#;

    #[test]
    fn minimal_graph() {
        let g = load_graph(
            r#"{"name": "m", "classes": [{"id": "A"}, {"id": "B"}],
                "edges": [{"src": "A", "dst": "B", "kind": "static", "count": 1}]}"#,
        )
        .unwrap();
        assert_eq!(g.class_count(), 2);
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn graph_errors() {
        let err = load_graph(r#"{"name": "m", "classes": [{"id": "A"}, {"id": "A"}], "edges": []}"#).unwrap_err();
        assert_eq!(err, IngestError::Graph(GraphError::DuplicateClass("A".into())));
        assert_eq!(err.kind(), "DuplicateClass");

        let err = load_graph(
            r#"{"name": "m", "classes": [{"id": "A"}],
                "edges": [{"src": "A", "dst": "Z", "kind": "static", "count": 1}]}"#,
        )
        .unwrap_err();
        assert_eq!(err, IngestError::Graph(GraphError::UnknownEdgeEndpoint("Z".into())));

        let err = load_graph(
            r#"{"name": "m", "classes": [{"id": "A"}, {"id": "B"}],
                "edges": [{"src": "A", "dst": "B", "kind": "runtime", "count": 2},
                          {"src": "A", "dst": "B", "kind": "runtime", "count": 5}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.kind(), "DuplicateEdge");

        let err = load_graph(
            r#"{"name": "m", "classes": [{"id": "A"}, {"id": "B"}],
                "edges": [{"src": "A", "dst": "B", "kind": "runtime", "count": -3}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::BadCount { count: -3, .. }));
    }

    #[test]
    fn parse_error_has_position() {
        let err = load_graph("{\n  \"name\": \"m\",\n  \"classes\": [\n}").unwrap_err();
        match err {
            IngestError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let err = load_graph(r#"{"name": "m", "classes": [], "edges": [{"src": "a", "dst": "b", "kind": "dynamic"}]}"#)
            .unwrap_err();
        assert_eq!(err.kind(), "ParseError");
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let g = load_graph(
            r#"{"name": "m", "version": 3, "classes": [{"id": "A", "loc": 120}],
                "edges": [{"src": "A", "dst": "A", "kind": "runtime", "count": 4, "note": "x"}]}"#,
        )
        .unwrap();
        assert_eq!(g.edges()[0].count, 4);
    }

    #[test]
    fn decomposition_documents() {
        let g = load_graph(G4).unwrap();
        let d = load_decomposition(
            r#"{"tool": "t", "system": "g4", "services": [
                {"name": "x", "classes": ["A", "B"]}, {"name": "y", "classes": ["C", "D"]}]}"#,
            &g,
        )
        .unwrap();
        assert_eq!(d.micro(), 2);

        let err = load_decomposition(
            r#"{"tool": "t", "system": "g4", "services": [{"name": "x", "classes": ["A", "B"]}]}"#,
            &g,
        )
        .unwrap_err();
        assert_eq!(err, IngestError::Partition(PartitionError::MissingClass("C".into())));

        let err = load_decomposition("{\"tool\": \"t\",\n \"services\": 7}", &g).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 2, .. }));
    }

    #[test]
    fn documents_round_trip() {
        let g = load_graph(G4).unwrap();
        let text = save_graph(&g);
        let again = load_graph(&text).unwrap();
        assert_eq!(g, again);
        assert_eq!(text, save_graph(&again));

        let d = Decomposition::new(
            "t",
            "g4",
            vec![Service::new("x", ["D", "A"]), Service::new("y", ["B", "C"])],
        );
        let text = save_decomposition(&d);
        assert_eq!(load_decomposition(&text, &g).unwrap(), d);
    }
}
