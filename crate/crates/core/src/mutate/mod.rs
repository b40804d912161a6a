//! Corpus generation: semantics-preserving rewrites, bug injection and the
//! JSON-lines pair dataset.

mod dataset;
mod inject;
mod transform;

pub use dataset::{generate_dataset, BuggyPair, Dataset, DatasetConfig, DatasetRecord, GenError, Manifest, Split};
pub use inject::{
    inject, inject_me, inject_vm, inject_wco, me_candidates, sample_failing, vm_candidates, wco_candidates, BugType, Injection,
};
pub use transform::{
    count_sites, for_to_while, mirror_comparison, mirror_comparisons, mirror_incdec, reorder_decls, swap_if_else, Family,
};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lang::Program;

/// Nonempty subset of the mutation families, identified by `1..=31`.
/// Bit `k` enables `Family::ALL[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MutationConfig(u8);

impl MutationConfig {
    pub const COUNT: u8 = 31;

    pub fn new(id: u8) -> Result<Self, String> {
        if (1..=Self::COUNT).contains(&id) {
            Ok(MutationConfig(id))
        } else {
            Err(format!("mutation config id {id} outside 1..=31"))
        }
    }

    pub fn all() -> impl Iterator<Item = MutationConfig> {
        (1..=Self::COUNT).map(MutationConfig)
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn contains(self, f: Family) -> bool {
        self.0 & f.bit() != 0
    }

    /// Enabled families in application order.
    pub fn families(self) -> Vec<Family> {
        Family::CANONICAL_ORDER.into_iter().filter(|&f| self.contains(f)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationOutcome {
    pub program: Program,
    /// Families that found at least one site.
    pub applied: Vec<Family>,
}

impl MutationOutcome {
    pub fn any_applied(&self) -> bool {
        !self.applied.is_empty()
    }
}

/// Applies the enabled families in canonical order. Each family rewrites a
/// seeded random nonempty subset of its sites, so different seeds give
/// different variants of the same configuration.
pub fn apply_config(program: &Program, cfg: MutationConfig, seed: u64) -> MutationOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = program.clone();
    let mut applied = Vec::new();
    for family in cfg.families() {
        let sites = count_sites(&current, family);
        if sites == 0 {
            continue;
        }
        let mut chosen: Vec<bool> = (0..sites).map(|_| rng.random_bool(0.5)).collect();
        if !chosen.iter().any(|&c| c) {
            let all: Vec<usize> = (0..sites).collect();
            chosen[*all.choose(&mut rng).unwrap()] = true;
        }
        let (next, _) = transform::rewrite(&current, family, &|i| chosen[i], &mut rng);
        current = next.resolved().expect("rewrites keep programs well scoped");
        applied.push(family);
    }
    MutationOutcome {
        program: current,
        applied,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_ids_cover_all_subsets() {
        let all: Vec<_> = MutationConfig::all().collect();
        assert_eq!(all.len(), 31);
        assert!(MutationConfig::new(0).is_err());
        assert!(MutationConfig::new(32).is_err());
        assert_eq!(MutationConfig::new(31).unwrap().families(), Family::CANONICAL_ORDER.to_vec());
        assert_eq!(MutationConfig::new(1).unwrap().families(), vec![Family::MirrorComparisons]);
    }

    #[test]
    fn inapplicable_config_is_flagged() {
        let p = crate::lang::parse("int main(){ int a; a = 1; printf(\"%d\", a); return 0; }").unwrap();
        let out = apply_config(&p, MutationConfig::new(31).unwrap(), 3);
        assert!(!out.any_applied());
        assert_eq!(out.program, p);
    }
}
