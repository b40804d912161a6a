//! Learn variable mappings between two programs with a relational graph
//! network over their syntax trees, and use those mappings to repair wrong
//! comparison operators, misused variables and missing expressions.

pub mod corpus;
pub mod graph;
pub mod harness;
pub mod lang;
pub mod mapper;
pub mod mutate;
pub mod nn;
pub mod repair;
pub mod selftest;
pub mod util;
