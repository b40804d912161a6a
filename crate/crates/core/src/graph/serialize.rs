use serde::{Deserialize, Serialize};

use super::{Edge, NodeTypeVocab, ProgramGraph, Relation};

const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphDecodeError {
    #[error("malformed graph payload: {0}")]
    Malformed(String),
    #[error("unsupported graph format version {0}")]
    Version(u32),
    #[error("graph is inconsistent: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct Wire {
    version: u32,
    nodes: Vec<u16>,
    /// `[src, dst, relation]` triples.
    edges: Vec<(u32, u32, u8)>,
    var_nodes: Vec<u32>,
    var_names: Vec<String>,
}

/// JSON encoding. Field order and number formatting are fixed, so equal
/// graphs always serialize to equal bytes.
pub fn serialize_graph(g: &ProgramGraph) -> Vec<u8> {
    let wire = Wire {
        version: GRAPH_FORMAT_VERSION,
        nodes: g.nodes.clone(),
        edges: g.edges.iter().map(|e| (e.src, e.dst, e.rel as u8)).collect(),
        var_nodes: g.var_nodes.clone(),
        var_names: g.var_names.clone(),
    };
    serde_json::to_vec(&wire).expect("graph serialization cannot fail")
}

pub fn deserialize_graph(bytes: &[u8]) -> Result<ProgramGraph, GraphDecodeError> {
    let wire: Wire = serde_json::from_slice(bytes).map_err(|e| GraphDecodeError::Malformed(e.to_string()))?;
    if wire.version != GRAPH_FORMAT_VERSION {
        return Err(GraphDecodeError::Version(wire.version));
    }
    let n = wire.nodes.len() as u32;
    let vocab = NodeTypeVocab::default().len() as u16;
    if let Some(k) = wire.nodes.iter().find(|&&k| k >= vocab) {
        return Err(GraphDecodeError::Invalid(format!("node kind {k} outside vocabulary")));
    }
    let mut edges = Vec::with_capacity(wire.edges.len());
    for (src, dst, rel) in wire.edges {
        let rel = Relation::from_index(rel).ok_or_else(|| GraphDecodeError::Invalid(format!("relation {rel}")))?;
        if src >= n || dst >= n {
            return Err(GraphDecodeError::Invalid(format!("edge {src}->{dst} out of range")));
        }
        edges.push(Edge { src, dst, rel });
    }
    if wire.var_nodes.iter().any(|&v| v >= n) || wire.var_nodes.len() != wire.var_names.len() {
        return Err(GraphDecodeError::Invalid("variable node table".into()));
    }
    Ok(ProgramGraph {
        nodes: wire.nodes,
        edges,
        var_nodes: wire.var_nodes,
        var_names: wire.var_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeSetConfig};
    use crate::lang::parse;

    #[test]
    fn round_trip_and_stability() {
        for src in ["int main(){ int a, b; a = a - b; return 0; }", "int main(){ return 0; }"] {
            let g = build_graph(&parse(src).unwrap(), &EdgeSetConfig::all());
            let bytes = serialize_graph(&g);
            assert_eq!(deserialize_graph(&bytes).unwrap(), g);
            assert_eq!(serialize_graph(&g), bytes);
        }
    }

    #[test]
    fn malformed_payloads() {
        assert!(matches!(deserialize_graph(b"nope"), Err(GraphDecodeError::Malformed(_))));
        let bad = br#"{"version":9,"nodes":[],"edges":[],"var_nodes":[],"var_names":[]}"#;
        assert!(matches!(deserialize_graph(bad), Err(GraphDecodeError::Version(9))));
        let bad = br#"{"version":1,"nodes":[0],"edges":[[0,3,0]],"var_nodes":[],"var_names":[]}"#;
        assert!(matches!(deserialize_graph(bad), Err(GraphDecodeError::Invalid(_))));
    }
}
