//! Typed program graphs: the syntax tree plus one anonymous node per
//! variable, connected by child, sibling, read, write and chronological
//! edges.

mod build;
mod serialize;
mod vocab;

pub use build::build_graph;
pub use serialize::{deserialize_graph, serialize_graph, GraphDecodeError};
pub use vocab::NodeTypeVocab;

use serde::{Deserialize, Serialize};

/// Edge relation index as seen by the network. The bidirectional families
/// get one relation per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Relation {
    ChildFwd = 0,
    ChildBack = 1,
    Sibling = 2,
    WriteFwd = 3,
    WriteBack = 4,
    ReadFwd = 5,
    ReadBack = 6,
    Chrono = 7,
}

pub const NUM_RELATIONS: usize = 8;

impl Relation {
    pub const ALL: [Relation; NUM_RELATIONS] = [
        Relation::ChildFwd,
        Relation::ChildBack,
        Relation::Sibling,
        Relation::WriteFwd,
        Relation::WriteBack,
        Relation::ReadFwd,
        Relation::ReadBack,
        Relation::Chrono,
    ];

    pub fn from_index(i: u8) -> Option<Relation> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn family(self) -> EdgeFamily {
        match self {
            Relation::ChildFwd | Relation::ChildBack => EdgeFamily::Ast,
            Relation::Sibling => EdgeFamily::Sibling,
            Relation::WriteFwd | Relation::WriteBack => EdgeFamily::Write,
            Relation::ReadFwd | Relation::ReadBack => EdgeFamily::Read,
            Relation::Chrono => EdgeFamily::Chronological,
        }
    }
}

/// Logical edge families, numbered 0..5 in the order used by edge masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeFamily {
    Ast = 0,
    Sibling = 1,
    Write = 2,
    Read = 3,
    Chronological = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSetConfig {
    pub ast: bool,
    pub sibling: bool,
    pub write: bool,
    pub read: bool,
    pub chronological: bool,
}

impl Default for EdgeSetConfig {
    fn default() -> Self {
        EdgeSetConfig::all()
    }
}

impl EdgeSetConfig {
    pub fn all() -> Self {
        EdgeSetConfig {
            ast: true,
            sibling: true,
            write: true,
            read: true,
            chronological: true,
        }
    }

    /// Builds a config from enabled family indices
    /// (0 ast, 1 sibling, 2 write, 3 read, 4 chronological).
    pub fn from_indices(indices: &[usize]) -> Result<Self, String> {
        let mut c = EdgeSetConfig {
            ast: false,
            sibling: false,
            write: false,
            read: false,
            chronological: false,
        };
        for &i in indices {
            match i {
                0 => c.ast = true,
                1 => c.sibling = true,
                2 => c.write = true,
                3 => c.read = true,
                4 => c.chronological = true,
                _ => return Err(format!("edge family index {i} out of range 0..5")),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn indices(&self) -> Vec<usize> {
        [self.ast, self.sibling, self.write, self.read, self.chronological]
            .iter()
            .enumerate()
            .filter(|(_, on)| **on)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn enabled(&self, family: EdgeFamily) -> bool {
        match family {
            EdgeFamily::Ast => self.ast,
            EdgeFamily::Sibling => self.sibling,
            EdgeFamily::Write => self.write,
            EdgeFamily::Read => self.read,
            EdgeFamily::Chronological => self.chronological,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.indices().is_empty() {
            Err("at least one edge family must be enabled".into())
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub rel: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramGraph {
    /// Kind index of every node.
    pub nodes: Vec<u16>,
    pub edges: Vec<Edge>,
    /// Node index of each variable node, in declaration order.
    pub var_nodes: Vec<u32>,
    /// Variable keys, parallel to `var_nodes`. Used for reporting only.
    pub var_names: Vec<String>,
}

impl ProgramGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_vars(&self) -> usize {
        self.var_nodes.len()
    }

    pub fn edges_of(&self, rel: Relation) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.rel == rel)
    }
}
