//! JSON wire formats.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{ReebGraph, VertexId};
use crate::label::Label;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: VertexId,
    pub label: Label,
}

/// `{"vertices": [{"id", "label"}], "edges": [[a, b], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl From<&ReebGraph> for GraphFile {
    fn from(g: &ReebGraph) -> Self {
        let vertices = g
            .sorted_by_label()
            .into_iter()
            .map(|id| VertexRecord {
                label: g.label_of(&id).clone(),
                id,
            })
            .collect();
        GraphFile {
            vertices,
            edges: g.edges(),
        }
    }
}

impl TryFrom<GraphFile> for ReebGraph {
    type Error = GraphError;

    fn try_from(f: GraphFile) -> Result<Self, GraphError> {
        ReebGraph::new(f.vertices.into_iter().map(|v| (v.id, v.label)), f.edges)
    }
}

impl Serialize for ReebGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReebGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = GraphFile::deserialize(d)?;
        ReebGraph::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Parses a graph; structural Reeb conditions are left to `validate`.
pub fn parse_graph(text: &str) -> Result<ReebGraph, GraphError> {
    let file: GraphFile = serde_json::from_str(text)?;
    ReebGraph::try_from(file)
}

pub fn graph_to_json(g: &ReebGraph) -> String {
    serde_json::to_string_pretty(g).expect("graph serializes")
}
