use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_rows, probability_matrix, GraphInput, MapError, ModelConfig, ModelParams};
use crate::graph::ProgramGraph;
use crate::nn::{AdamConfig, AdamState, Tape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub model: ModelConfig,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            seed: 0,
            model: ModelConfig::default(),
            adam: AdamConfig::default(),
        }
    }
}

/// One supervised example: `labels[i]` is the correct-side variable index
/// for buggy-side variable `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub buggy: ProgramGraph,
    pub correct: ProgramGraph,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Exact-match rate on the validation pairs, when any were given.
    pub valid_exact: Option<f64>,
}

struct Prepared {
    buggy: GraphInput,
    correct: GraphInput,
    labels: Vec<usize>,
}

fn prepare(model: &ModelParams, pairs: &[TrainingPair]) -> Result<Vec<Prepared>, MapError> {
    pairs
        .iter()
        .map(|p| {
            let columns = p.correct.num_vars();
            if p.labels.len() != p.buggy.num_vars() {
                return Err(MapError::Label {
                    label: p.labels.len(),
                    columns: p.buggy.num_vars(),
                });
            }
            if let Some(&label) = p.labels.iter().find(|&&l| l >= columns) {
                return Err(MapError::Label { label, columns });
            }
            Ok(Prepared {
                buggy: model.input(&p.buggy)?,
                correct: model.input(&p.correct)?,
                labels: p.labels.clone(),
            })
        })
        .collect()
}

/// Fraction of pairs whose argmax mapping equals the labels exactly.
pub fn evaluate_exact(model: &ModelParams, pairs: &[TrainingPair]) -> Result<f64, MapError> {
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let prepared = prepare(model, pairs)?;
    exact_rate(model, &prepared)
}

fn exact_rate(model: &ModelParams, prepared: &[Prepared]) -> Result<f64, MapError> {
    let mut hits = 0;
    for p in prepared {
        let probs = probability_matrix(model, &p.buggy, &p.correct)?;
        if argmax_rows(&probs) == p.labels {
            hits += 1;
        }
    }
    Ok(hits as f64 / prepared.len() as f64)
}

/// Trains with batch size 1, reshuffling the pairs every epoch. The same
/// seed gives bit-identical parameters.
pub fn train(
    train_pairs: &[TrainingPair],
    valid_pairs: &[TrainingPair],
    cfg: &TrainConfig,
    mut log: impl FnMut(&EpochLog),
) -> Result<ModelParams, MapError> {
    if cfg.epochs == 0 {
        return Err(MapError::Config("epochs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = ModelParams::init(cfg.model.clone(), &mut rng)?;
    let prepared = prepare(&model, train_pairs)?;
    let valid = prepare(&model, valid_pairs)?;
    let usable: Vec<usize> = (0..prepared.len()).filter(|&i| !prepared[i].labels.is_empty()).collect();
    if usable.is_empty() {
        return Err(MapError::EmptyDataset);
    }
    let mut adam = AdamState::new(&model.params, cfg.adam);
    let mut order = usable;
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let p = &prepared[i];
            let mut tape = Tape::new();
            let s = model.scores_on(&mut tape, &p.buggy, &p.correct)?;
            let loss = tape.softmax_cross_entropy(s, &p.labels)?;
            total += tape.scalar(loss);
            model.params.zero_grad();
            tape.backward(loss, &mut model.params)?;
            adam.step(&mut model.params);
        }
        let entry = EpochLog {
            epoch,
            mean_loss: total / order.len() as f64,
            valid_exact: if valid.is_empty() { None } else { Some(exact_rate(&model, &valid)?) },
        };
        log(&entry);
    }
    model.params.zero_grad();
    Ok(model)
}
