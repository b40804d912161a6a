//! Mapping and repair benchmarks over a generated dataset.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::lang::DEFAULT_STEP_LIMIT;
use crate::mapper::{enumerate_mappings, predict_mapping, uniform_mappings, MapError, ModelParams, VariableMapping};
use crate::mutate::{DatasetRecord, Split};
use crate::repair::{repair_since, RepairConfig, RepairStatus};
use crate::util::{mix_seed, parallel_map};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot compare an empty mapping with a nonempty one")]
    EmptyMapping,
    #[error("mappings cover different variables")]
    DomainMismatch,
    #[error("record {0}: {1}")]
    Record(String, String),
    #[error("unknown assignment `{0}`")]
    UnknownAssignment(String),
    #[error("method `{0}` needs a trained model")]
    MissingModel(&'static str),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Shared pairs over the size of the smaller mapping. Two empty mappings
/// agree completely.
pub fn overlap_coefficient(a: &BTreeMap<String, String>, b: &BTreeMap<String, String>) -> Result<f64, HarnessError> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Err(HarnessError::EmptyMapping),
        _ => {}
    }
    if !a.keys().eq(b.keys()) {
        return Err(HarnessError::DomainMismatch);
    }
    let shared = a.iter().filter(|(k, v)| b.get(*k) == Some(v)).count();
    Ok(shared as f64 / a.len().min(b.len()) as f64)
}

/// Stable identifier of a dataset record.
pub fn pair_id(r: &DatasetRecord) -> String {
    format!("{}/{}/c{}/s{}", r.program_id, r.bug_type.name(), r.mutation_config_id, r.sample)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub pairs: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MappingSection {
    pub pairs: usize,
    pub exact: usize,
    pub exact_rate: f64,
    pub mean_overlap: f64,
    /// Keyed by the number of buggy-side variables.
    pub by_var_count: BTreeMap<usize, Bucket>,
}

impl MappingSection {
    fn add(&mut self, vars: usize, exact: bool, overlap: f64) {
        self.pairs += 1;
        self.exact += exact as usize;
        // running sum, turned into a mean by `finish`
        self.mean_overlap += overlap;
        let b = self.by_var_count.entry(vars).or_default();
        b.pairs += 1;
        b.exact += exact as usize;
    }

    fn finish(&mut self) {
        if self.pairs > 0 {
            self.exact_rate = self.exact as f64 / self.pairs as f64;
            self.mean_overlap /= self.pairs as f64;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub version: u32,
    pub split: Split,
    pub edges: Vec<usize>,
    pub overall: MappingSection,
    pub per_bug_type: BTreeMap<String, MappingSection>,
}

/// Argmax-mapping quality of `model` on the records of `split`.
pub fn evaluate_mappings(
    model: &ModelParams,
    records: &[DatasetRecord],
    split: Split,
    threads: usize,
) -> Result<MappingReport, HarnessError> {
    let chosen: Vec<&DatasetRecord> = records.iter().filter(|r| r.split == split).collect();
    let scored = parallel_map(&chosen, threads, |r| -> Result<(usize, bool, f64), HarnessError> {
        let pair = r.to_pair().map_err(|e| HarnessError::Record(pair_id(r), e.to_string()))?;
        let predicted = if pair.buggy.num_vars() == 0 {
            BTreeMap::new()
        } else {
            predict_mapping(&pair.buggy, &pair.correct, model)?.to_map()
        };
        let overlap = overlap_coefficient(&predicted, &r.mapping)?;
        Ok((pair.buggy.num_vars(), predicted == r.mapping, overlap))
    });
    let mut overall = MappingSection::default();
    let mut per_bug_type: BTreeMap<String, MappingSection> = BTreeMap::new();
    for (r, s) in chosen.iter().zip(scored) {
        let (vars, exact, overlap) = s?;
        overall.add(vars, exact, overlap);
        per_bug_type.entry(r.bug_type.name().to_string()).or_default().add(vars, exact, overlap);
    }
    overall.finish();
    per_bug_type.values_mut().for_each(MappingSection::finish);
    Ok(MappingReport {
        version: REPORT_VERSION,
        split,
        edges: model.config.edges.indices(),
        overall,
        per_bug_type,
    })
}

/// Source of variable mappings for repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Model predictions in decreasing likelihood.
    Gnn,
    /// Every mapping in a seeded random order.
    Uniform,
    /// Only the ground-truth mapping.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gnn, Method::Uniform, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gnn => "gnn",
            Method::Uniform => "uniform",
            Method::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairEvalConfig {
    pub budget: Duration,
    pub seed: u64,
    pub threads: usize,
    pub step_limit: u64,
}

impl Default for RepairEvalConfig {
    fn default() -> Self {
        RepairEvalConfig {
            budget: crate::repair::DEFAULT_BUDGET,
            seed: 0,
            threads: 1,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairRow {
    pub pair_id: String,
    pub bug_type: String,
    pub status: RepairStatus,
    pub seconds: f64,
    pub mappings_tried: usize,
    pub candidates_tried: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub pairs: usize,
    pub fixed: usize,
    pub exhausted: usize,
    pub timeout: usize,
}

impl StatusCounts {
    fn add(&mut self, s: RepairStatus) {
        self.pairs += 1;
        match s {
            RepairStatus::Fixed => self.fixed += 1,
            RepairStatus::Exhausted => self.exhausted += 1,
            RepairStatus::Timeout => self.timeout += 1,
        }
    }

    pub fn rate(&self, n: usize) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            n as f64 / self.pairs as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(xs: impl Iterator<Item = f64>) -> Option<Summary> {
        let xs: Vec<f64> = xs.collect();
        if xs.is_empty() {
            return None;
        }
        Some(Summary {
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairSection {
    pub method: Method,
    pub counts: StatusCounts,
    pub fixed_rate: f64,
    pub exhausted_rate: f64,
    pub timeout_rate: f64,
    pub per_bug_type: BTreeMap<String, StatusCounts>,
    /// Mappings consumed by the fixed pairs.
    pub mappings_used: Option<Summary>,
    pub rows: Vec<RepairRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    pub version: u32,
    pub split: Split,
    pub budget_seconds: f64,
    pub timing: String,
    pub methods: Vec<RepairSection>,
}

pub const TIMING_NOTE: &str =
    "per-pair seconds cover graph building, mapping prediction and enumeration, and the repair search; checkpoint loading is excluded";

/// Runs repair on every record of `split` with the mapping stream of
/// `method`.
pub fn evaluate_repair(
    corpus: &Corpus,
    records: &[DatasetRecord],
    split: Split,
    method: Method,
    model: Option<&ModelParams>,
    cfg: &RepairEvalConfig,
) -> Result<RepairSection, HarnessError> {
    if method == Method::Gnn && model.is_none() {
        return Err(HarnessError::MissingModel("gnn"));
    }
    let chosen: Vec<(usize, &DatasetRecord)> = records.iter().enumerate().filter(|(_, r)| r.split == split).collect();
    for (_, r) in &chosen {
        if corpus.assignment(&r.ipa_id).is_none() {
            return Err(HarnessError::UnknownAssignment(r.ipa_id.clone()));
        }
    }
    let rcfg = RepairConfig {
        budget: cfg.budget,
        step_limit: cfg.step_limit,
        scratch_dir: None,
    };
    let rows = parallel_map(&chosen, cfg.threads, |&(index, r)| -> Result<RepairRow, HarnessError> {
        let pair = r.to_pair().map_err(|e| HarnessError::Record(pair_id(r), e.to_string()))?;
        let suite = &corpus.assignment(&r.ipa_id).expect("checked above").suite;
        let start = Instant::now();
        let buggy_keys = pair.buggy.var_keys();
        let correct_keys = pair.correct.var_keys();
        let to_map = |cols: Vec<usize>| -> BTreeMap<String, String> {
            buggy_keys.iter().cloned().zip(cols.into_iter().map(|c| correct_keys[c].clone())).collect()
        };
        let stream: Box<dyn Iterator<Item = BTreeMap<String, String>>> = match method {
            Method::Oracle => Box::new(std::iter::once(r.mapping.clone())),
            Method::Uniform => {
                let seed = mix_seed(cfg.seed, &[index as u64]);
                Box::new(uniform_mappings(buggy_keys.len(), correct_keys.len(), seed).map(to_map))
            }
            Method::Gnn => match gnn_probabilities(&pair.buggy, &pair.correct, model.unwrap()) {
                Some(p) => Box::new(enumerate_mappings(&p.probs).map(move |(cols, _)| to_map(cols))),
                None => Box::new(std::iter::empty()),
            },
        };
        let out = repair_since(start, &pair.buggy, &pair.correct, stream, suite, &rcfg);
        Ok(RepairRow {
            pair_id: pair_id(r),
            bug_type: r.bug_type.name().to_string(),
            status: out.status,
            seconds: out.elapsed,
            mappings_tried: out.mappings_tried,
            candidates_tried: out.candidates_tried,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut counts = StatusCounts::default();
    let mut per_bug_type: BTreeMap<String, StatusCounts> = BTreeMap::new();
    for row in &rows {
        counts.add(row.status);
        per_bug_type.entry(row.bug_type.clone()).or_default().add(row.status);
    }
    let mappings_used = Summary::of(
        rows.iter()
            .filter(|r| r.status == RepairStatus::Fixed)
            .map(|r| r.mappings_tried as f64),
    );
    Ok(RepairSection {
        method,
        fixed_rate: counts.rate(counts.fixed),
        exhausted_rate: counts.rate(counts.exhausted),
        timeout_rate: counts.rate(counts.timeout),
        counts,
        per_bug_type,
        mappings_used,
        rows,
    })
}

fn gnn_probabilities(
    buggy: &crate::lang::Program,
    correct: &crate::lang::Program,
    model: &ModelParams,
) -> Option<VariableMapping> {
    predict_mapping(buggy, correct, model).ok()
}

/// `program_id,method,seconds` rows for the fixed pairs of each method,
/// sorted by time within each method.
pub fn cactus_csv(sections: &[RepairSection]) -> String {
    let mut out = String::from("program_id,method,seconds\n");
    for s in sections {
        let mut fixed: Vec<&RepairRow> = s.rows.iter().filter(|r| r.status == RepairStatus::Fixed).collect();
        fixed.sort_by(|a, b| a.seconds.total_cmp(&b.seconds).then_with(|| a.pair_id.cmp(&b.pair_id)));
        for r in fixed {
            out.push_str(&format!("{},{},{:.6}\n", r.pair_id, s.method.name(), r.seconds));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn overlap_examples() {
        let a = m(&[("n", "l"), ("i", "j")]);
        assert_eq!(overlap_coefficient(&a, &a).unwrap(), 1.0);
        assert_eq!(overlap_coefficient(&a, &m(&[("n", "l"), ("i", "k")])).unwrap(), 0.5);
        assert_eq!(overlap_coefficient(&a, &m(&[("n", "x"), ("i", "y")])).unwrap(), 0.0);
        assert_eq!(overlap_coefficient(&m(&[]), &m(&[])).unwrap(), 1.0);
        assert_eq!(overlap_coefficient(&a, &m(&[])), Err(HarnessError::EmptyMapping));
        assert_eq!(overlap_coefficient(&a, &m(&[("q", "l"), ("i", "j")])), Err(HarnessError::DomainMismatch));
    }

    #[test]
    fn cactus_rows_are_sorted_and_fixed_only() {
        let row = |id: &str, status, seconds| RepairRow {
            pair_id: id.into(),
            bug_type: "wco".into(),
            status,
            seconds,
            mappings_tried: 1,
            candidates_tried: 1,
        };
        let section = RepairSection {
            method: Method::Oracle,
            counts: StatusCounts::default(),
            fixed_rate: 0.0,
            exhausted_rate: 0.0,
            timeout_rate: 0.0,
            per_bug_type: BTreeMap::new(),
            mappings_used: None,
            rows: vec![
                row("b", RepairStatus::Fixed, 0.5),
                row("c", RepairStatus::Timeout, 60.0),
                row("a", RepairStatus::Fixed, 0.25),
            ],
        };
        let csv = cactus_csv(&[section]);
        assert_eq!(csv, "program_id,method,seconds\na,oracle,0.250000\nb,oracle,0.500000\n");
    }
}
