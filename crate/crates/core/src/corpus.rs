//! Seed corpus of reference solutions, one directory per assignment:
//!
//! ```text
//! ipa05/
//!   suite/01.in 01.out ...
//!   train/*.c
//!   eval/*.c
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::lang::{parse, LangError, Program, TestSuite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Eval,
}

#[derive(Debug, Clone)]
pub struct SeedProgram {
    /// `ipa05/train/v1`
    pub id: String,
    pub partition: Partition,
    pub source: String,
    pub program: Program,
}

#[derive(Debug, Clone)]
pub struct Assignment {
    pub id: String,
    pub suite: TestSuite,
    pub programs: Vec<SeedProgram>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Lang { path: String, source: LangError },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("corpus at {0} contains no assignments")]
    Empty(String),
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let rd = fs::read_dir(dir).map_err(|e| CorpusError::Io(dir.display().to_string(), e))?;
    let mut out: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
    out.sort();
    Ok(out)
}

impl Corpus {
    /// Location of the corpus shipped with this crate.
    pub fn bundled_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
    }

    pub fn bundled() -> Result<Corpus, CorpusError> {
        Corpus::load(&Corpus::bundled_dir())
    }

    pub fn load(root: &Path) -> Result<Corpus, CorpusError> {
        let mut assignments = Vec::new();
        for dir in sorted_entries(root)? {
            if !dir.is_dir() {
                continue;
            }
            let id = dir.file_name().unwrap().to_string_lossy().into_owned();
            let suite = TestSuite::load_dir(&dir.join("suite")).map_err(|source| CorpusError::Lang {
                path: dir.join("suite").display().to_string(),
                source,
            })?;
            let mut programs = Vec::new();
            for (sub, partition) in [("train", Partition::Train), ("eval", Partition::Eval)] {
                let pdir = dir.join(sub);
                if !pdir.is_dir() {
                    continue;
                }
                for file in sorted_entries(&pdir)? {
                    if file.extension().and_then(|e| e.to_str()) != Some("c") {
                        continue;
                    }
                    let source = fs::read_to_string(&file).map_err(|e| CorpusError::Io(file.display().to_string(), e))?;
                    let program = parse(&source).map_err(|source| CorpusError::Lang {
                        path: file.display().to_string(),
                        source,
                    })?;
                    let stem = file.file_stem().unwrap().to_string_lossy();
                    programs.push(SeedProgram {
                        id: format!("{id}/{sub}/{stem}"),
                        partition,
                        source,
                        program,
                    });
                }
            }
            assignments.push(Assignment { id, suite, programs });
        }
        if assignments.is_empty() {
            return Err(CorpusError::Empty(root.display().to_string()));
        }
        Ok(Corpus {
            root: root.to_path_buf(),
            assignments,
        })
    }

    pub fn assignment(&self, id: &str) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.id == id)
    }

    pub fn programs(&self) -> impl Iterator<Item = (&Assignment, &SeedProgram)> {
        self.assignments.iter().flat_map(|a| a.programs.iter().map(move |p| (a, p)))
    }

    /// SHA-256 of every file under the corpus root, keyed by relative path.
    pub fn file_hashes(&self) -> Result<Vec<(String, String)>, CorpusError> {
        let mut out = Vec::new();
        let mut stack = vec![self.root.clone()];
        while let Some(dir) = stack.pop() {
            for p in sorted_entries(&dir)? {
                if p.is_dir() {
                    stack.push(p);
                } else {
                    let bytes = fs::read(&p).map_err(|e| CorpusError::Io(p.display().to_string(), e))?;
                    let rel = p.strip_prefix(&self.root).unwrap().to_string_lossy().replace('\\', "/");
                    out.push((rel, hex::encode(Sha256::digest(&bytes))));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}
