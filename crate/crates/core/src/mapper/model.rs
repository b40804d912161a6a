use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MapError;
use crate::graph::{EdgeSetConfig, NodeTypeVocab, ProgramGraph, Relation, NUM_RELATIONS};
use crate::nn::{self, read_checkpoint, write_checkpoint, Neighbourhood, NnError, ParamId, ParamSet, Tape, Var};

pub const DEFAULT_HIDDEN: usize = 64;
pub const DEFAULT_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buggy,
    Correct,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Buggy => 0,
            Side::Correct => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Buggy => "buggy",
            Side::Correct => "correct",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hidden: usize,
    pub steps: usize,
    pub edges: EdgeSetConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden: DEFAULT_HIDDEN,
            steps: DEFAULT_STEPS,
            edges: EdgeSetConfig::all(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct StepIds {
    root: ParamId,
    rel: [ParamId; NUM_RELATIONS],
    gain: ParamId,
    bias: ParamId,
}

/// Embedding table shared by both sides, plus one message-passing stack
/// per side.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub vocab: NodeTypeVocab,
    pub params: ParamSet,
    embedding: ParamId,
    layers: [Vec<StepIds>; 2],
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    format: String,
    hidden: usize,
    steps: usize,
    edges: Vec<usize>,
    vocab: Vec<String>,
}

const CHECKPOINT_FORMAT: &str = "varmap-rgcn";

impl ModelParams {
    /// Glorot-uniform weights, standard-normal embeddings, unit gain and
    /// zero bias.
    pub fn init(config: ModelConfig, rng: &mut ChaCha8Rng) -> Result<Self, MapError> {
        config.edges.validate().map_err(MapError::Config)?;
        if config.hidden == 0 || config.steps == 0 {
            return Err(MapError::Config("hidden size and step count must be positive".into()));
        }
        let vocab = NodeTypeVocab::default();
        let d = config.hidden;
        let mut params = ParamSet::new();
        let embedding = params.add("embedding", nn::standard_normal(rng, vocab.len(), d));
        let mut layers: [Vec<StepIds>; 2] = [Vec::new(), Vec::new()];
        for side in [Side::Buggy, Side::Correct] {
            for s in 0..config.steps {
                let prefix = format!("{}.{s}", side.label());
                let root = params.add(format!("{prefix}.root"), nn::glorot_uniform(rng, d, d));
                let mut rel = [0; NUM_RELATIONS];
                for (r, slot) in rel.iter_mut().enumerate() {
                    *slot = params.add(format!("{prefix}.rel{r}"), nn::glorot_uniform(rng, d, d));
                }
                let gain = params.add(format!("{prefix}.ln_gain"), Array2::ones((1, d)));
                let bias = params.add(format!("{prefix}.ln_bias"), Array2::zeros((1, d)));
                layers[side.index()].push(StepIds { root, rel, gain, bias });
            }
        }
        Ok(ModelParams {
            config,
            vocab,
            params,
            embedding,
            layers,
        })
    }

    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, MapError> {
        ModelParams::init(config, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    fn from_params(config: ModelConfig, vocab: NodeTypeVocab, params: ParamSet) -> Result<Self, MapError> {
        let id = |name: String| params.id(&name).ok_or_else(|| MapError::Checkpoint(format!("missing tensor `{name}`")));
        let embedding = id("embedding".into())?;
        let mut layers: [Vec<StepIds>; 2] = [Vec::new(), Vec::new()];
        for side in [Side::Buggy, Side::Correct] {
            for s in 0..config.steps {
                let prefix = format!("{}.{s}", side.label());
                let mut rel = [0; NUM_RELATIONS];
                for (r, slot) in rel.iter_mut().enumerate() {
                    *slot = id(format!("{prefix}.rel{r}"))?;
                }
                layers[side.index()].push(StepIds {
                    root: id(format!("{prefix}.root"))?,
                    rel,
                    gain: id(format!("{prefix}.ln_gain"))?,
                    bias: id(format!("{prefix}.ln_bias"))?,
                });
            }
        }
        let d = config.hidden;
        for t in params.names().iter().zip(params.tensors()) {
            let expect = if t.0 == "embedding" {
                (vocab.len(), d)
            } else if t.0.ends_with("ln_gain") || t.0.ends_with("ln_bias") {
                (1, d)
            } else {
                (d, d)
            };
            if t.1.shape() != expect {
                return Err(MapError::Checkpoint(format!("tensor `{}` has shape {:?}", t.0, t.1.shape())));
            }
        }
        Ok(ModelParams {
            config,
            vocab,
            params,
            embedding,
            layers,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let meta = CheckpointMeta {
            format: CHECKPOINT_FORMAT.into(),
            hidden: self.config.hidden,
            steps: self.config.steps,
            edges: self.config.edges.indices(),
            vocab: self.vocab.kinds().to_vec(),
        };
        let mut out = Vec::new();
        write_checkpoint(&mut out, &serde_json::to_value(meta).unwrap(), &self.params).expect("writing to memory");
        out
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, MapError> {
        let (meta, params) = read_checkpoint(&mut bytes).map_err(|e| MapError::Checkpoint(e.to_string()))?;
        let meta: CheckpointMeta = serde_json::from_value(meta).map_err(|e| MapError::Checkpoint(e.to_string()))?;
        if meta.format != CHECKPOINT_FORMAT {
            return Err(MapError::Checkpoint(format!("unexpected format `{}`", meta.format)));
        }
        let vocab = NodeTypeVocab::default();
        if meta.vocab != vocab.kinds() {
            return Err(MapError::VocabMismatch);
        }
        let edges = EdgeSetConfig::from_indices(&meta.edges).map_err(MapError::Checkpoint)?;
        let config = ModelConfig {
            hidden: meta.hidden,
            steps: meta.steps,
            edges,
        };
        ModelParams::from_params(config, vocab, params)
    }

    pub fn save(&self, path: &Path) -> Result<(), MapError> {
        let f = File::create(path).map_err(|e| MapError::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        std::io::Write::write_all(&mut w, &self.to_bytes()).map_err(|e| MapError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, MapError> {
        let f = File::open(path).map_err(|e| MapError::Io(format!("{}: {e}", path.display())))?;
        let mut bytes = Vec::new();
        std::io::Read::read_to_end(&mut BufReader::new(f), &mut bytes).map_err(|e| MapError::Io(e.to_string()))?;
        ModelParams::from_bytes(&bytes)
    }

    /// Records the encoder on `tape` and returns the final node vectors.
    pub fn encode_on(&self, tape: &mut Tape, input: &GraphInput, side: Side) -> Result<Var, NnError> {
        let mut x = tape.embed(&self.params, self.embedding, &input.kinds)?;
        for step in &self.layers[side.index()] {
            let root = tape.param(&self.params, step.root);
            let mut h = tape.matmul_t(x, root)?;
            for (r, nb) in input.neighbourhoods.iter().enumerate() {
                let Some(nb) = nb else { continue };
                let m = tape.mean_aggregate(x, nb.clone())?;
                let w = tape.param(&self.params, step.rel[r]);
                let msg = tape.matmul_t(m, w)?;
                h = tape.add(h, msg)?;
            }
            let gain = tape.param(&self.params, step.gain);
            let bias = tape.param(&self.params, step.bias);
            let h = tape.layer_norm(h, gain, bias)?;
            x = tape.relu(h);
        }
        Ok(x)
    }

    /// Score matrix `S = A·Bᵀ` between the variable-node vectors of both sides.
    pub fn scores_on(&self, tape: &mut Tape, buggy: &GraphInput, correct: &GraphInput) -> Result<Var, NnError> {
        let a = self.encode_on(tape, buggy, Side::Buggy)?;
        let b = self.encode_on(tape, correct, Side::Correct)?;
        let a = tape.gather_rows(a, &buggy.var_nodes)?;
        let b = tape.gather_rows(b, &correct.var_nodes)?;
        tape.matmul_t(a, b)
    }

    pub fn input(&self, graph: &ProgramGraph) -> Result<GraphInput, MapError> {
        GraphInput::new(graph, &self.config.edges, &self.vocab)
    }
}

/// A graph prepared for the encoder: kind indices, per-relation incoming
/// lists restricted to the enabled edge families, and variable rows.
#[derive(Debug, Clone)]
pub struct GraphInput {
    pub kinds: Vec<usize>,
    pub neighbourhoods: Vec<Option<Arc<Neighbourhood>>>,
    pub var_nodes: Vec<usize>,
    pub var_names: Vec<String>,
}

impl GraphInput {
    pub fn new(graph: &ProgramGraph, edges: &EdgeSetConfig, vocab: &NodeTypeVocab) -> Result<Self, MapError> {
        if let Some(&k) = graph.nodes.iter().find(|&&k| k as usize >= vocab.len()) {
            return Err(MapError::UnknownKind(k));
        }
        let n = graph.num_nodes();
        let neighbourhoods = Relation::ALL
            .iter()
            .map(|&rel| {
                if !edges.enabled(rel.family()) {
                    return None;
                }
                let pairs: Vec<(u32, u32)> = graph.edges_of(rel).map(|e| (e.src, e.dst)).collect();
                if pairs.is_empty() {
                    None
                } else {
                    Some(Arc::new(Neighbourhood::from_edges(n, pairs)))
                }
            })
            .collect();
        Ok(GraphInput {
            kinds: graph.nodes.iter().map(|&k| k as usize).collect(),
            neighbourhoods,
            var_nodes: graph.var_nodes.iter().map(|&v| v as usize).collect(),
            var_names: graph.var_names.clone(),
        })
    }
}

/// Final node vectors of `graph` under one side's encoder.
pub fn rgcn_encode(graph: &ProgramGraph, side: Side, model: &ModelParams) -> Result<Array2<f64>, MapError> {
    let input = model.input(graph)?;
    let mut tape = Tape::new();
    let x = model.encode_on(&mut tape, &input, side)?;
    Ok(tape.value(x).clone())
}
