use serde::{Deserialize, Serialize};

/// Node kinds, in index order. Changing this list invalidates checkpoints.
const KINDS: &[&str] = &[
    "program",
    "func-int",
    "func-float",
    "func-void",
    "params",
    "param-int",
    "param-float",
    "block",
    "decl-int",
    "decl-float",
    "declarator",
    "if",
    "while",
    "for",
    "empty",
    "return",
    "break",
    "continue",
    "printf",
    "scanf",
    "call",
    "expr",
    "unary",
    "incdec",
    "assign",
    "assign+=",
    "assign-=",
    "assign*=",
    "assign/=",
    "assign%=",
    "cast-int",
    "cast-float",
    "ID",
    "int-const",
    "float-const",
    "format-string",
    "+",
    "-",
    "*",
    "/",
    "%",
    "<",
    "<=",
    ">",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
    "neg",
    "!",
    "pre++",
    "post++",
    "pre--",
    "post--",
    "var",
];

/// Ordered set of node-kind symbols. Identifiers never appear here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTypeVocab {
    kinds: Vec<String>,
}

impl Default for NodeTypeVocab {
    fn default() -> Self {
        NodeTypeVocab {
            kinds: KINDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl NodeTypeVocab {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn symbol(&self, index: usize) -> Option<&str> {
        self.kinds.get(index).map(String::as_str)
    }

    pub fn kinds(&self) -> &[String] {
        &self.kinds
    }

    /// Index of a kind in the built-in vocabulary.
    pub(crate) fn builtin(kind: &str) -> u16 {
        KINDS
            .iter()
            .position(|k| *k == kind)
            .unwrap_or_else(|| panic!("unknown node kind `{kind}`")) as u16
    }
}
