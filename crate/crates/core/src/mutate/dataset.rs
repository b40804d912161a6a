use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::inject::{inject, sample_failing, BugType};
use super::{apply_config, MutationConfig};
use crate::corpus::{Corpus, Partition};
use crate::graph::{build_graph, EdgeSetConfig};
use crate::lang::{parse, pretty_print, rename_variables, run_test_suite, Direction, LangError, Program, Renaming};
use crate::mapper::TrainingPair;
use crate::util::{mix_seed, parallel_map};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Eval,
}

impl Split {
    pub fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "valid" => Some(Split::Valid),
            "eval" => Some(Split::Eval),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub seed: u64,
    /// Mutated variants drawn per (program, configuration).
    pub per_config_samples: usize,
    /// Keep every failing injection instead of one sampled per bug type.
    pub exhaustive: bool,
    /// Give buggy programs fresh variable names.
    pub rename_buggy: bool,
    /// Share of training-partition programs held out for validation.
    pub valid_fraction: f64,
    pub step_limit: u64,
    #[serde(skip)]
    pub threads: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            seed: 0,
            per_config_samples: 1,
            exhaustive: false,
            rename_buggy: false,
            valid_fraction: 0.2,
            step_limit: crate::lang::DEFAULT_STEP_LIMIT,
            threads: 1,
        }
    }
}

/// One serialized pair. `mapping` goes from buggy variable keys to correct
/// variable keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub program_id: String,
    pub ipa_id: String,
    pub split: Split,
    pub bug_type: BugType,
    pub bug: String,
    pub mutation_config_id: u8,
    pub sample: usize,
    pub correct_source: String,
    pub buggy_source: String,
    pub mapping: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuggyPair {
    pub correct: Program,
    pub buggy: Program,
    pub mapping: BTreeMap<String, String>,
    pub bug_type: BugType,
    pub mutation_config_id: u8,
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("reference program {program} passes only {passed}/{total} tests of its suite")]
    FailingSeed { program: String, passed: usize, total: usize },
    #[error("record {line}: {msg}")]
    Record { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl DatasetRecord {
    pub fn to_pair(&self) -> Result<BuggyPair, LangError> {
        Ok(BuggyPair {
            correct: parse(&self.correct_source)?,
            buggy: parse(&self.buggy_source)?,
            mapping: self.mapping.clone(),
            bug_type: self.bug_type,
            mutation_config_id: self.mutation_config_id,
        })
    }

    /// Graphs with every edge family (models filter what they use) and
    /// the label column of each buggy variable.
    pub fn training_pair(&self) -> Result<TrainingPair, String> {
        let pair = self.to_pair().map_err(|e| e.to_string())?;
        let correct_keys = pair.correct.var_keys();
        let labels = pair
            .buggy
            .var_keys()
            .iter()
            .map(|k| {
                let target = pair.mapping.get(k).ok_or_else(|| format!("no mapping for `{k}`"))?;
                correct_keys
                    .iter()
                    .position(|c| c == target)
                    .ok_or_else(|| format!("`{target}` is not a variable of the correct program"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let all = EdgeSetConfig::all();
        Ok(TrainingPair {
            buggy: build_graph(&pair.buggy, &all),
            correct: build_graph(&pair.correct, &all),
            labels,
        })
    }
}

/// Reproducibility record written next to a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub config: DatasetConfig,
    pub corpus_files: Vec<(String, String)>,
    pub records: usize,
    pub per_split: BTreeMap<String, usize>,
    pub per_bug_type: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &DatasetRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for r in &self.records {
            serde_json::to_writer(&mut out, r).expect("records serialize");
            out.push(b'\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), GenError> {
        let mut f = fs::File::create(path).map_err(|e| GenError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(&self.to_jsonl()).map_err(|e| GenError::Io(e.to_string()))
    }

    pub fn read_jsonl(path: &Path) -> Result<Dataset, GenError> {
        let f = fs::File::open(path).map_err(|e| GenError::Io(format!("{}: {e}", path.display())))?;
        let mut records = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| GenError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let r = serde_json::from_str(&line).map_err(|e| GenError::Record {
                line: i + 1,
                msg: e.to_string(),
            })?;
            records.push(r);
        }
        Ok(Dataset { records })
    }

    pub fn manifest(&self, corpus: &Corpus, config: &DatasetConfig) -> Result<Manifest, GenError> {
        let mut per_split = BTreeMap::new();
        let mut per_bug_type = BTreeMap::new();
        for r in &self.records {
            let s = serde_json::to_value(r.split).unwrap().as_str().unwrap().to_string();
            *per_split.entry(s).or_insert(0) += 1;
            *per_bug_type.entry(r.bug_type.name().to_string()).or_insert(0) += 1;
        }
        Ok(Manifest {
            version: 1,
            config: config.clone(),
            corpus_files: corpus.file_hashes().map_err(|e| GenError::Io(e.to_string()))?,
            records: self.records.len(),
            per_split,
            per_bug_type,
        })
    }

    /// Training pairs of one split, in record order.
    pub fn training_pairs(&self, split: Split) -> Result<Vec<TrainingPair>, GenError> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.split == split)
            .map(|(i, r)| r.training_pair().map_err(|msg| GenError::Record { line: i + 1, msg }))
            .collect()
    }
}

const FRESH_NAMES: &[&str] = &[
    "a", "b", "c", "d", "e", "f", "g", "h", "k", "m", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z", "aux", "cnt", "tmp",
    "val", "num", "res", "acc", "idx", "lim",
];

/// Bijective renaming of every variable to names drawn from a shuffled pool.
fn fresh_renaming(program: &Program, rng: &mut ChaCha8Rng) -> Renaming {
    let mut pool: Vec<String> = FRESH_NAMES.iter().map(|s| s.to_string()).collect();
    let mut extra = 0;
    while pool.len() < program.num_vars() {
        pool.push(format!("v{extra}"));
        extra += 1;
    }
    pool.shuffle(rng);
    pool.truncate(program.num_vars());
    Renaming::new(program, &pool).expect("pool names are distinct")
}

fn split_assignment(corpus: &Corpus, cfg: &DatasetConfig) -> BTreeMap<String, Split> {
    let mut train_ids: Vec<String> = corpus
        .programs()
        .filter(|(_, p)| p.partition == Partition::Train)
        .map(|(_, p)| p.id.clone())
        .collect();
    train_ids.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, &[0x5u64]));
    train_ids.shuffle(&mut rng);
    let n_valid = ((train_ids.len() as f64) * cfg.valid_fraction).round() as usize;
    let mut out = BTreeMap::new();
    for (i, id) in train_ids.into_iter().enumerate() {
        out.insert(id, if i < n_valid { Split::Valid } else { Split::Train });
    }
    for (_, p) in corpus.programs().filter(|(_, p)| p.partition == Partition::Eval) {
        out.insert(p.id.clone(), Split::Eval);
    }
    out
}

/// Builds the pair dataset: every corpus program under every mutation
/// configuration, with one failing injection per bug type (or all of them
/// when exhaustive). Output order and content depend only on the corpus
/// and the configuration.
pub fn generate_dataset(corpus: &Corpus, cfg: &DatasetConfig) -> Result<Dataset, GenError> {
    for (a, p) in corpus.programs() {
        let report = run_test_suite(&p.program, &a.suite, cfg.step_limit);
        if !report.all_passed() {
            return Err(GenError::FailingSeed {
                program: p.id.clone(),
                passed: report.passed,
                total: report.total,
            });
        }
    }
    let splits = split_assignment(corpus, cfg);
    let jobs: Vec<(usize, &crate::corpus::Assignment, &crate::corpus::SeedProgram)> =
        corpus.programs().enumerate().map(|(i, (a, p))| (i, a, p)).collect();

    let per_program = parallel_map(&jobs, cfg.threads, |&(index, assignment, seed_program)| {
        let correct = &seed_program.program;
        let correct_source = pretty_print(correct);
        let correct_keys = correct.var_keys();
        let mut records = Vec::new();
        for mc in MutationConfig::all() {
            for sample in 0..cfg.per_config_samples {
                let job_seed = mix_seed(cfg.seed, &[index as u64, mc.id() as u64, sample as u64]);
                let mutant = apply_config(correct, mc, job_seed).program;
                let mut sorted = mutant.var_keys();
                sorted.sort();
                let mut expected = correct_keys.clone();
                expected.sort();
                assert_eq!(sorted, expected, "mutations never rename variables");
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(job_seed, &[1]));
                for bug in BugType::ALL {
                    let found = if cfg.exhaustive {
                        inject(&mutant, bug, &assignment.suite, mix_seed(job_seed, &[2, bug as u64]))
                    } else {
                        sample_failing(&mutant, bug, &assignment.suite, cfg.step_limit, &mut rng)
                            .into_iter()
                            .collect()
                    };
                    for inj in found {
                        let mut buggy = inj.program;
                        let original_keys = buggy.var_keys();
                        if cfg.rename_buggy {
                            let renaming = fresh_renaming(&buggy, &mut rng);
                            buggy = rename_variables(&buggy, &renaming, Direction::Forward).expect("fresh names are valid");
                        }
                        let mapping = buggy.var_keys().into_iter().zip(original_keys).collect();
                        records.push(DatasetRecord {
                            program_id: seed_program.id.clone(),
                            ipa_id: assignment.id.clone(),
                            split: splits[&seed_program.id],
                            bug_type: bug,
                            bug: inj.description,
                            mutation_config_id: mc.id(),
                            sample,
                            correct_source: correct_source.clone(),
                            buggy_source: pretty_print(&buggy),
                            mapping,
                        });
                    }
                }
            }
        }
        records
    });
    Ok(Dataset {
        records: per_program.into_iter().flatten().collect(),
    })
}
