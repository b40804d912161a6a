//! The variable-mapping model: graph encoders, score matrix, training loop,
//! prediction and lazy enumeration of alternative mappings.

mod enumerate;
mod model;
mod train;

pub use enumerate::{enumerate_mappings, joint_probability, uniform_mappings, MappingStream, UniformMappings};
pub use model::{rgcn_encode, GraphInput, ModelConfig, ModelParams, Side, DEFAULT_HIDDEN, DEFAULT_STEPS};
pub use train::{evaluate_exact, train, EpochLog, TrainConfig, TrainingPair};

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::Serialize;

use crate::graph::{build_graph, EdgeSetConfig};
use crate::lang::Program;
use crate::nn::{softmax_rows, NnError, Tape};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint was trained with a different node vocabulary")]
    VocabMismatch,
    #[error("node kind {0} is outside the vocabulary")]
    UnknownKind(u16),
    #[error("the correct program has no variables to map onto")]
    NoCorrectVariables,
    #[error("training set is empty")]
    EmptyDataset,
    #[error("label {label} out of range for {columns} correct-side variables")]
    Label { label: usize, columns: usize },
    #[error("io: {0}")]
    Io(String),
}

/// Assignment of one correct-side variable to every buggy-side variable,
/// together with the probability matrix it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableMapping {
    pub buggy_vars: Vec<String>,
    pub correct_vars: Vec<String>,
    /// Column chosen for each buggy variable.
    pub assignment: Vec<usize>,
    #[serde(skip)]
    pub probs: Array2<f64>,
    pub log_likelihood: f64,
}

impl VariableMapping {
    pub fn new(buggy_vars: Vec<String>, correct_vars: Vec<String>, assignment: Vec<usize>, probs: Array2<f64>) -> Self {
        let log_likelihood = assignment.iter().enumerate().map(|(i, &j)| probs[[i, j]].ln()).sum();
        VariableMapping {
            buggy_vars,
            correct_vars,
            assignment,
            probs,
            log_likelihood,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.buggy_vars[i].as_str(), self.correct_vars[j].as_str()))
    }

    /// Buggy variable key → correct variable key.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    /// Same assignment over a different probability matrix.
    pub fn with_assignment(&self, assignment: Vec<usize>) -> Self {
        VariableMapping::new(self.buggy_vars.clone(), self.correct_vars.clone(), assignment, self.probs.clone())
    }
}

/// `S[i][j] = a_i · b_j` and its row softmax.
pub fn score_mapping(buggy_vecs: &Array2<f64>, correct_vecs: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>), MapError> {
    if buggy_vecs.ncols() != correct_vecs.ncols() {
        return Err(NnError::Shape {
            op: "score_mapping",
            left: buggy_vecs.dim(),
            right: correct_vecs.dim(),
        }
        .into());
    }
    let s = buggy_vecs.dot(&correct_vecs.t());
    let p = softmax_rows(&s);
    Ok((s, p))
}

/// Row-wise argmax; ties go to the lower column.
pub fn argmax_rows(p: &Array2<f64>) -> Vec<usize> {
    p.rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Probability matrix between two prepared graphs.
pub fn probability_matrix(model: &ModelParams, buggy: &GraphInput, correct: &GraphInput) -> Result<Array2<f64>, MapError> {
    if correct.var_nodes.is_empty() && !buggy.var_nodes.is_empty() {
        return Err(MapError::NoCorrectVariables);
    }
    if buggy.var_nodes.is_empty() {
        return Ok(Array2::zeros((0, correct.var_nodes.len())));
    }
    let mut tape = Tape::new();
    let s = model.scores_on(&mut tape, buggy, correct)?;
    Ok(softmax_rows(tape.value(s)))
}

/// Most likely mapping from the buggy program's variables to the correct
/// program's. An empty buggy side yields an empty mapping.
pub fn predict_mapping(buggy: &Program, correct: &Program, model: &ModelParams) -> Result<VariableMapping, MapError> {
    let (gb, gc) = pair_inputs(buggy, correct, model)?;
    let p = probability_matrix(model, &gb, &gc)?;
    let assignment = argmax_rows(&p);
    Ok(VariableMapping::new(gb.var_names, gc.var_names, assignment, p))
}

pub(crate) fn pair_inputs(buggy: &Program, correct: &Program, model: &ModelParams) -> Result<(GraphInput, GraphInput), MapError> {
    let all = EdgeSetConfig::all();
    let gb = model.input(&build_graph(buggy, &all))?;
    let gc = model.input(&build_graph(correct, &all))?;
    Ok((gb, gc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn orthonormal_vectors_map_to_themselves() {
        let a = Array2::from_diag(&array![1.0, 1.0, 1.0]);
        let (_, p) = score_mapping(&a, &a).unwrap();
        assert_eq!(argmax_rows(&p), vec![0, 1, 2]);
    }

    #[test]
    fn two_by_three_rows_are_stochastic() {
        let a = array![[1.0, 0.5], [-0.3, 2.0]];
        let b = array![[0.1, 0.2], [1.0, -1.0], [0.0, 0.7]];
        let (s, p) = score_mapping(&a, &b).unwrap();
        assert_eq!(s.dim(), (2, 3));
        assert_eq!(p.dim(), (2, 3));
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn argmax_prefers_lower_index_on_ties() {
        assert_eq!(argmax_rows(&array![[0.25, 0.5, 0.25], [0.5, 0.5, 0.0]]), vec![1, 0]);
    }

    #[test]
    fn single_variable_programs_map_with_certainty() {
        let model = ModelParams::new(
            ModelConfig {
                hidden: 4,
                ..ModelConfig::default()
            },
            1,
        )
        .unwrap();
        let a = crate::lang::parse("int main(){ int x; scanf(\"%d\", &x); printf(\"%d\", x); return 0; }").unwrap();
        let b = crate::lang::parse("int main(){ int y; y = 2; printf(\"%d\", y); return 0; }").unwrap();
        let m = predict_mapping(&a, &b, &model).unwrap();
        assert_eq!(m.to_map(), BTreeMap::from([("x".to_string(), "y".to_string())]));
        assert_eq!(m.probs[[0, 0]], 1.0);
        let none = crate::lang::parse("int main(){ return 0; }").unwrap();
        assert_eq!(predict_mapping(&a, &none, &model), Err(MapError::NoCorrectVariables));
        assert!(predict_mapping(&none, &a, &model).unwrap().is_empty());
    }
}
