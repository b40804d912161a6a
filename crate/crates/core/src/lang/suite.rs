//! Input/output test suites.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ast::Program;
use super::interp::{interpret_with, Limits, Status};
use super::LangError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub input: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(cases: Vec<TestCase>) -> Result<Self, LangError> {
        if cases.is_empty() {
            return Err(LangError::EmptySuite);
        }
        Ok(TestSuite { cases })
    }

    pub fn cases(&self) -> &[TestCase] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Loads `NN.in` / `NN.out` pairs from a directory, sorted by file name.
    pub fn load_dir(dir: &Path) -> Result<Self, LangError> {
        let io = |e: std::io::Error| LangError::Io(format!("{}: {e}", dir.display()));
        let mut stems: Vec<String> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().to_string_lossy().into_owned();
                name.strip_suffix(".in").map(str::to_string)
            })
            .collect();
        stems.sort();
        let mut cases = Vec::with_capacity(stems.len());
        for stem in stems {
            let input = fs::read_to_string(dir.join(format!("{stem}.in"))).map_err(io)?;
            let expected = fs::read_to_string(dir.join(format!("{stem}.out"))).map_err(io)?;
            cases.push(TestCase { input, expected });
        }
        TestSuite::new(cases)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), LangError> {
        let io = |e: std::io::Error| LangError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        for (i, c) in self.cases.iter().enumerate() {
            fs::write(dir.join(format!("{:02}.in", i + 1)), &c.input).map_err(io)?;
            fs::write(dir.join(format!("{:02}.out", i + 1)), &c.expected).map_err(io)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub passed: usize,
    pub total: usize,
    /// True when a deadline cut the run short; the counts are then partial.
    pub interrupted: bool,
}

impl TestReport {
    pub fn all_passed(&self) -> bool {
        !self.interrupted && self.passed == self.total
    }
}

/// Strips trailing whitespace on each line and trailing blank lines.
pub fn normalize_output(s: &str) -> String {
    let lines: Vec<&str> = s.lines().map(str::trim_end).collect();
    let mut end = lines.len();
    while end > 0 && lines[end - 1].is_empty() {
        end -= 1;
    }
    lines[..end].join("\n")
}

pub fn run_test_suite(program: &Program, suite: &TestSuite, step_limit: u64) -> TestReport {
    run_test_suite_until(program, suite, step_limit, None)
}

/// Like [`run_test_suite`], but gives up once `deadline` has passed.
pub fn run_test_suite_until(
    program: &Program,
    suite: &TestSuite,
    step_limit: u64,
    deadline: Option<Instant>,
) -> TestReport {
    let limits = Limits { step_limit, deadline };
    let mut passed = 0;
    for case in &suite.cases {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return TestReport {
                passed,
                total: suite.len(),
                interrupted: true,
            };
        }
        let r = interpret_with(program, &case.input, limits);
        match r.status {
            Status::Ok => {
                if normalize_output(&r.stdout) == normalize_output(&case.expected) {
                    passed += 1;
                }
            }
            Status::DeadlineExceeded => {
                return TestReport {
                    passed,
                    total: suite.len(),
                    interrupted: true,
                }
            }
            _ => {}
        }
    }
    TestReport {
        passed,
        total: suite.len(),
        interrupted: false,
    }
}

/// Runs cases until the first failure. `None` when the deadline interrupted
/// the run before a verdict.
pub fn passes_all_until(program: &Program, suite: &TestSuite, step_limit: u64, deadline: Option<Instant>) -> Option<bool> {
    let limits = Limits { step_limit, deadline };
    for case in &suite.cases {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let r = interpret_with(program, &case.input, limits);
        match r.status {
            Status::DeadlineExceeded => return None,
            Status::Ok if normalize_output(&r.stdout) == normalize_output(&case.expected) => {}
            _ => return Some(false),
        }
    }
    Some(true)
}

pub fn fails_some_test(program: &Program, suite: &TestSuite, step_limit: u64) -> bool {
    passes_all_until(program, suite, step_limit, None) == Some(false)
}
