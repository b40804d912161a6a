//! Mapping-driven repair of wrong comparison operators, variable misuse
//! and missing expressions, validated against the test suite.

mod candidates;

pub use candidates::{mirrored_expression, Candidates, CmpKey, CmpMultiset, MappedPair, RepairCandidate};

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::lang::suite::passes_all_until;
use crate::lang::{pretty_print, Program, TestSuite, DEFAULT_STEP_LIMIT};
use crate::mutate::BugType;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);

/// Candidate generators for one mapping (keys of the buggy program to keys
/// of the correct one), each renamed back to the buggy program's names.
pub fn repair_wco(buggy: &Program, correct: &Program, mapping: &BTreeMap<String, String>) -> Vec<RepairCandidate> {
    MappedPair::new(buggy, correct, mapping).map(|p| p.wco().collect()).unwrap_or_default()
}

pub fn repair_vm(buggy: &Program, correct: &Program, mapping: &BTreeMap<String, String>) -> Vec<RepairCandidate> {
    MappedPair::new(buggy, correct, mapping).map(|p| p.vm().collect()).unwrap_or_default()
}

pub fn repair_me(buggy: &Program, correct: &Program, mapping: &BTreeMap<String, String>) -> Vec<RepairCandidate> {
    MappedPair::new(buggy, correct, mapping).map(|p| p.me().collect()).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairStatus {
    Fixed,
    Exhausted,
    Timeout,
}

impl RepairStatus {
    pub fn name(self) -> &'static str {
        match self {
            RepairStatus::Fixed => "fixed",
            RepairStatus::Exhausted => "exhausted",
            RepairStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    pub fixed_source: Option<String>,
    /// Bug class and edit of the accepted candidate.
    pub fixed_by: Option<(BugType, String)>,
    pub mappings_tried: usize,
    /// Distinct candidates run against the suite.
    pub candidates_tried: usize,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairConfig {
    pub budget: Duration,
    pub step_limit: u64,
    /// Every candidate run is also written here.
    pub scratch_dir: Option<PathBuf>,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            budget: DEFAULT_BUDGET,
            step_limit: DEFAULT_STEP_LIMIT,
            scratch_dir: None,
        }
    }
}

/// Tries every candidate of every mapping in stream order until one passes
/// the whole suite.
pub fn repair<I>(buggy: &Program, correct: &Program, mappings: I, suite: &TestSuite, cfg: &RepairConfig) -> RepairOutcome
where
    I: IntoIterator<Item = BTreeMap<String, String>>,
{
    repair_since(Instant::now(), buggy, correct, mappings, suite, cfg)
}

/// Like [`repair`], with the budget counted from `start` so that work done
/// before the call (producing the mapping stream) is charged too.
pub fn repair_since<I>(
    start: Instant,
    buggy: &Program,
    correct: &Program,
    mappings: I,
    suite: &TestSuite,
    cfg: &RepairConfig,
) -> RepairOutcome
where
    I: IntoIterator<Item = BTreeMap<String, String>>,
{
    let deadline = start + cfg.budget;
    let mut out = RepairOutcome {
        status: RepairStatus::Exhausted,
        fixed_source: None,
        fixed_by: None,
        mappings_tried: 0,
        candidates_tried: 0,
        elapsed: 0.0,
    };
    let mut seen: HashSet<String> = HashSet::new();
    let finish = |mut out: RepairOutcome, status| {
        out.status = status;
        out.elapsed = start.elapsed().as_secs_f64();
        out
    };
    if let Some(dir) = &cfg.scratch_dir {
        let _ = fs::create_dir_all(dir);
    }
    for mapping in mappings {
        if Instant::now() >= deadline {
            return finish(out, RepairStatus::Timeout);
        }
        out.mappings_tried += 1;
        let Ok(pair) = MappedPair::new(buggy, correct, &mapping) else {
            continue;
        };
        for cand in pair.all() {
            if Instant::now() >= deadline {
                return finish(out, RepairStatus::Timeout);
            }
            let source = pretty_print(&cand.program);
            if !seen.insert(source.clone()) {
                continue;
            }
            out.candidates_tried += 1;
            if let Some(dir) = &cfg.scratch_dir {
                let _ = fs::write(dir.join(format!("candidate_{:06}.c", out.candidates_tried)), &source);
            }
            match passes_all_until(&cand.program, suite, cfg.step_limit, Some(deadline)) {
                None => return finish(out, RepairStatus::Timeout),
                Some(true) => {
                    out.fixed_source = Some(source);
                    out.fixed_by = Some((cand.bug_type, cand.description));
                    return finish(out, RepairStatus::Fixed);
                }
                Some(false) => {}
            }
        }
    }
    finish(out, RepairStatus::Exhausted)
}
