use serde::{Deserialize, Serialize};

use super::{Cpdag, Dag, GraphError};

/// Wire format shared by results records, network files and learned-graph files:
/// `{"nodes": [names], "directed": [[u, v], ...], "undirected": [[u, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub directed: Vec<[usize; 2]>,
    #[serde(default)]
    pub undirected: Vec<[usize; 2]>,
}

impl From<&Dag> for GraphJson {
    fn from(d: &Dag) -> Self {
        GraphJson {
            nodes: d.names().to_vec(),
            directed: d.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            undirected: Vec::new(),
        }
    }
}

impl From<&Cpdag> for GraphJson {
    fn from(g: &Cpdag) -> Self {
        GraphJson {
            nodes: g.names().to_vec(),
            directed: g.directed_edges().into_iter().map(|(u, v)| [u, v]).collect(),
            undirected: g.undirected_edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Dag {
    type Error = GraphError;
    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        if !j.undirected.is_empty() {
            return Err(GraphError::UndirectedInDag);
        }
        Dag::with_names(j.nodes, j.directed.into_iter().map(|[u, v]| (u, v)))
    }
}

impl TryFrom<GraphJson> for Cpdag {
    type Error = GraphError;
    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        Cpdag::with_names(
            j.nodes,
            j.directed.into_iter().map(|[u, v]| (u, v)),
            j.undirected.into_iter().map(|[u, v]| (u, v)),
        )
    }
}

impl Serialize for Dag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Dag::try_from(GraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Cpdag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cpdag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Cpdag::try_from(GraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
