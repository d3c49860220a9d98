use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ConceptGraph, Edge, Identifier, NodeKind, RelationKind};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed graph document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("node at position {position} has id {found}; ids must be dense and sorted")]
    NodeId { position: usize, found: usize },
    #[error("edge {index} references node {id}, but the graph has {nodes} nodes")]
    EdgeEndpoint {
        index: usize,
        id: usize,
        nodes: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: usize,
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub src: usize,
    pub kind: RelationKind,
    pub dst: usize,
}

/// Wire form of a concept graph; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

impl From<&ConceptGraph> for GraphDocument {
    fn from(graph: &ConceptGraph) -> Self {
        GraphDocument {
            nodes: graph
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDoc {
                    id,
                    name: n.name.clone(),
                    kind: n.kind,
                })
                .collect(),
            edges: graph
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    src: e.src,
                    kind: e.kind,
                    dst: e.dst,
                })
                .collect(),
        }
    }
}

impl TryFrom<GraphDocument> for ConceptGraph {
    type Error = SchemaError;

    fn try_from(doc: GraphDocument) -> Result<Self, SchemaError> {
        let n = doc.nodes.len();
        let mut nodes = Vec::with_capacity(n);
        for (position, node) in doc.nodes.into_iter().enumerate() {
            if node.id != position {
                return Err(SchemaError::NodeId {
                    position,
                    found: node.id,
                });
            }
            nodes.push(Identifier::new(node.name, node.kind));
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (index, e) in doc.edges.into_iter().enumerate() {
            for id in [e.src, e.dst] {
                if id >= n {
                    return Err(SchemaError::EdgeEndpoint {
                        index,
                        id,
                        nodes: n,
                    });
                }
            }
            edges.push(Edge::new(e.src, e.kind, e.dst));
        }
        Ok(ConceptGraph::new(nodes, edges))
    }
}

/// Compact JSON for a graph. Byte-deterministic for a given graph.
pub fn graph_to_json(graph: &ConceptGraph) -> String {
    serde_json::to_string(&GraphDocument::from(graph)).expect("graph documents always serialize")
}

pub fn graph_from_json(text: &str) -> Result<ConceptGraph, SchemaError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    ConceptGraph::try_from(doc)
}
