//! Relational concept graphs of identifiers.
//!
//! A [`ConceptGraph`] holds identifier nodes (name plus [`NodeKind`]) and
//! typed directed edges between them. Node ids are dense indices into
//! `nodes`; [`canonicalize`] fixes a unique id assignment so graphs compare
//! and serialize deterministically.

mod extract;
mod json;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use extract::{extract_graph, extract_identifiers};
pub use json::{graph_from_json, graph_to_json, GraphDocument, SchemaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    MethodName,
    Parameter,
    Import,
    Variable,
    Call,
}

impl NodeKind {
    pub const ALL: [NodeKind; 5] = [
        NodeKind::MethodName,
        NodeKind::Parameter,
        NodeKind::Import,
        NodeKind::Variable,
        NodeKind::Call,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::MethodName => "method_name",
            NodeKind::Parameter => "parameter",
            NodeKind::Import => "import",
            NodeKind::Variable => "variable",
            NodeKind::Call => "call",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RelationKind {
    DependsOn,
    Defines,
    Calls,
    HasParameter,
    Invokes,
    Receives,
    TakesArgument,
    OfType,
    Reads,
}

impl RelationKind {
    pub const ALL: [RelationKind; 9] = [
        RelationKind::DependsOn,
        RelationKind::Defines,
        RelationKind::Calls,
        RelationKind::HasParameter,
        RelationKind::Invokes,
        RelationKind::Receives,
        RelationKind::TakesArgument,
        RelationKind::OfType,
        RelationKind::Reads,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::DependsOn => "dependsOn",
            RelationKind::Defines => "defines",
            RelationKind::Calls => "calls",
            RelationKind::HasParameter => "hasParameter",
            RelationKind::Invokes => "invokes",
            RelationKind::Receives => "receives",
            RelationKind::TakesArgument => "takesArgument",
            RelationKind::OfType => "ofType",
            RelationKind::Reads => "reads",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Allowed (source kinds, destination kinds) for this relation.
    pub fn endpoint_kinds(self) -> (&'static [NodeKind], &'static [NodeKind]) {
        use NodeKind::*;
        const VAR_OR_PARAM: &[NodeKind] = &[Variable, Parameter];
        match self {
            RelationKind::DependsOn => (&[MethodName], &[Import]),
            RelationKind::Defines => (&[MethodName], &[Variable]),
            RelationKind::Calls => (&[Variable], &[Call]),
            RelationKind::HasParameter => (&[MethodName], &[Parameter]),
            RelationKind::Invokes => (&[MethodName], &[Call]),
            RelationKind::Receives => (&[Call], VAR_OR_PARAM),
            RelationKind::TakesArgument => (&[Call], VAR_OR_PARAM),
            RelationKind::OfType => (VAR_OR_PARAM, &[Import]),
            RelationKind::Reads => (&[Variable], VAR_OR_PARAM),
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identifier {
    pub name: String,
    pub kind: NodeKind,
}

impl Identifier {
    pub fn new(name: impl Into<String>, kind: NodeKind) -> Self {
        Identifier {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub kind: RelationKind,
    pub dst: usize,
}

impl Edge {
    pub fn new(src: usize, kind: RelationKind, dst: usize) -> Self {
        Edge { src, kind, dst }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConceptGraph {
    pub nodes: Vec<Identifier>,
    pub edges: Vec<Edge>,
}

impl ConceptGraph {
    pub fn new(nodes: Vec<Identifier>, edges: Vec<Edge>) -> Self {
        ConceptGraph { nodes, edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn find(&self, name: &str, kind: NodeKind) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| n.kind == kind && n.name == name)
    }
}

/// Reassigns node ids by (kind, name) and sorts edges by (src, kind, dst).
pub fn canonicalize(graph: &ConceptGraph) -> ConceptGraph {
    let mut order: Vec<usize> = (0..graph.nodes.len()).collect();
    order.sort_by(|&a, &b| {
        let (na, nb) = (&graph.nodes[a], &graph.nodes[b]);
        (na.kind, &na.name).cmp(&(nb.kind, &nb.name))
    });
    let mut new_id = vec![0usize; graph.nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let nodes = order.iter().map(|&old| graph.nodes[old].clone()).collect();
    let mut edges: Vec<Edge> = graph
        .edges
        .iter()
        .map(|e| {
            Edge::new(
                new_id.get(e.src).copied().unwrap_or(e.src),
                e.kind,
                new_id.get(e.dst).copied().unwrap_or(e.dst),
            )
        })
        .collect();
    edges.sort();
    edges.dedup();
    ConceptGraph { nodes, edges }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode {
        id: usize,
        name: String,
        kind: NodeKind,
    },
    EmptyName {
        id: usize,
    },
    MethodNameCount(usize),
    DanglingEndpoint {
        edge: Edge,
    },
    SelfLoop {
        edge: Edge,
    },
    DuplicateEdge {
        edge: Edge,
    },
    EndpointKind {
        edge: Edge,
        src_kind: NodeKind,
        dst_kind: NodeKind,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { id, name, kind } => {
                write!(f, "node {id} duplicates ({name}, {kind})")
            }
            Violation::EmptyName { id } => write!(f, "node {id} has an empty name"),
            Violation::MethodNameCount(n) => {
                write!(f, "expected exactly one method_name node, found {n}")
            }
            Violation::DanglingEndpoint { edge } => {
                write!(
                    f,
                    "edge {}({}→{}) references a missing node",
                    edge.kind, edge.src, edge.dst
                )
            }
            Violation::SelfLoop { edge } => {
                write!(
                    f,
                    "edge {}({}→{}) is a self-loop",
                    edge.kind, edge.src, edge.dst
                )
            }
            Violation::DuplicateEdge { edge } => {
                write!(
                    f,
                    "edge {}({}→{}) is duplicated",
                    edge.kind, edge.src, edge.dst
                )
            }
            Violation::EndpointKind {
                edge,
                src_kind,
                dst_kind,
            } => write!(
                f,
                "edge {}({}→{}) connects {src_kind}→{dst_kind}",
                edge.kind, edge.src, edge.dst
            ),
        }
    }
}

/// Checks every structural invariant and the endpoint-kind table.
pub fn validate(graph: &ConceptGraph) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut seen = HashSet::new();
    for (id, node) in graph.nodes.iter().enumerate() {
        if node.name.is_empty() {
            violations.push(Violation::EmptyName { id });
        }
        if !seen.insert((node.name.as_str(), node.kind)) {
            violations.push(Violation::DuplicateNode {
                id,
                name: node.name.clone(),
                kind: node.kind,
            });
        }
    }

    let methods = graph
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::MethodName)
        .count();
    if methods != 1 {
        violations.push(Violation::MethodNameCount(methods));
    }

    let mut seen_edges = HashSet::new();
    for &edge in &graph.edges {
        let (Some(src), Some(dst)) = (graph.nodes.get(edge.src), graph.nodes.get(edge.dst)) else {
            violations.push(Violation::DanglingEndpoint { edge });
            continue;
        };
        if edge.src == edge.dst {
            violations.push(Violation::SelfLoop { edge });
        }
        if !seen_edges.insert(edge) {
            violations.push(Violation::DuplicateEdge { edge });
        }
        let (srcs, dsts) = edge.kind.endpoint_kinds();
        if !srcs.contains(&src.kind) || !dsts.contains(&dst.kind) {
            violations.push(Violation::EndpointKind {
                edge,
                src_kind: src.kind,
                dst_kind: dst.kind,
            });
        }
    }

    violations
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub nodes_by_kind: BTreeMap<String, usize>,
    pub edges_by_kind: BTreeMap<String, usize>,
}

impl GraphStats {
    /// Adds another graph's counts into this one.
    pub fn merge(&mut self, other: &GraphStats) {
        self.node_count += other.node_count;
        self.edge_count += other.edge_count;
        for (k, v) in &other.nodes_by_kind {
            *self.nodes_by_kind.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.edges_by_kind {
            *self.edges_by_kind.entry(k.clone()).or_default() += v;
        }
    }
}

pub fn stats(graph: &ConceptGraph) -> GraphStats {
    let mut nodes_by_kind: BTreeMap<String, usize> = NodeKind::ALL
        .iter()
        .map(|k| (k.as_str().to_string(), 0))
        .collect();
    let mut edges_by_kind: BTreeMap<String, usize> = RelationKind::ALL
        .iter()
        .map(|k| (k.as_str().to_string(), 0))
        .collect();
    for node in &graph.nodes {
        *nodes_by_kind
            .entry(node.kind.as_str().to_string())
            .or_default() += 1;
    }
    for edge in &graph.edges {
        *edges_by_kind
            .entry(edge.kind.as_str().to_string())
            .or_default() += 1;
    }
    GraphStats {
        node_count: graph.nodes.len(),
        edge_count: graph.edges.len(),
        nodes_by_kind,
        edges_by_kind,
    }
}
