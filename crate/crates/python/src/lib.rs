//! Python bindings: programs, the mapping model, repair and dataset
//! generation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use varmap::corpus::Corpus;
use varmap::harness::overlap_coefficient as overlap;
use varmap::lang::{interpret, parse, pretty_print, run_test_suite, Status, TestSuite, DEFAULT_STEP_LIMIT};
use varmap::mapper::{enumerate_mappings, predict_mapping, train as train_model, uniform_mappings, ModelConfig, ModelParams, TrainConfig};
use varmap::mutate::{generate_dataset as generate, Dataset, DatasetConfig, Split};
use varmap::repair::{repair_since, RepairConfig};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load_suite(dir: &str) -> PyResult<TestSuite> {
    TestSuite::load_dir(Path::new(dir)).map_err(|e| PyIOError::new_err(e.to_string()))
}

fn status_name(s: &Status) -> String {
    match s {
        Status::Ok => "ok".into(),
        Status::RuntimeError(k) => format!("runtime-error: {k:?}"),
        Status::StepLimitExceeded => "step-limit".into(),
        Status::DeadlineExceeded => "deadline".into(),
    }
}

/// A parsed and resolved program.
#[pyclass(frozen, module = "pyvarmap")]
struct Program {
    inner: varmap::lang::Program,
}

#[pymethods]
impl Program {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        parse(source).map(|inner| Program { inner }).map_err(value_err)
    }

    /// Canonical source text.
    fn source(&self) -> String {
        pretty_print(&self.inner)
    }

    /// Variable keys in declaration order.
    fn variables(&self) -> Vec<String> {
        self.inner.var_keys()
    }

    /// Runs the program and returns `(stdout, status, read_uninitialised)`.
    #[pyo3(signature = (stdin = "", step_limit = DEFAULT_STEP_LIMIT))]
    fn run(&self, stdin: &str, step_limit: u64) -> (String, String, bool) {
        let r = interpret(&self.inner, stdin, step_limit);
        (r.stdout, status_name(&r.status), r.uninit_read)
    }

    /// Number of passed cases and total cases of the suite in `suite_dir`.
    fn test(&self, suite_dir: &str) -> PyResult<(usize, usize)> {
        let report = run_test_suite(&self.inner, &load_suite(suite_dir)?, DEFAULT_STEP_LIMIT);
        Ok((report.passed, report.total))
    }

    fn __repr__(&self) -> String {
        format!("Program(variables={:?})", self.inner.var_keys())
    }
}

/// A trained mapping model.
#[pyclass(frozen, module = "pyvarmap")]
struct Model {
    inner: ModelParams,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        ModelParams::load(Path::new(path)).map(|inner| Model { inner }).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(Path::new(path)).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn hidden(&self) -> usize {
        self.inner.config.hidden
    }

    #[getter]
    fn edges(&self) -> Vec<usize> {
        self.inner.config.edges.indices()
    }

    /// Most likely mapping and the row probabilities, both keyed by
    /// variable keys.
    fn predict(&self, buggy: &Program, correct: &Program) -> PyResult<(BTreeMap<String, String>, BTreeMap<String, BTreeMap<String, f64>>)> {
        let m = predict_mapping(&buggy.inner, &correct.inner, &self.inner).map_err(value_err)?;
        let probs = m
            .buggy_vars
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), m.correct_vars.iter().enumerate().map(|(j, c)| (c.clone(), m.probs[[i, j]])).collect()))
            .collect();
        Ok((m.to_map(), probs))
    }
}

/// Repairs `buggy` against `correct` and the suite in `suite_dir`, trying
/// mappings from `model` (or uniformly at random without one).
#[pyfunction]
#[pyo3(signature = (buggy, correct, suite_dir, model = None, budget = 60.0, seed = 0, debug_dir = None))]
fn repair<'py>(
    py: Python<'py>,
    buggy: &Program,
    correct: &Program,
    suite_dir: &str,
    model: Option<&Model>,
    budget: f64,
    seed: u64,
    debug_dir: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(PyValueError::new_err("budget must be a positive number of seconds"));
    }
    let suite = load_suite(suite_dir)?;
    let (b, c) = (&buggy.inner, &correct.inner);
    let start = Instant::now();
    let (bk, ck) = (b.var_keys(), c.var_keys());
    let to_map = |cols: Vec<usize>| -> BTreeMap<String, String> { bk.iter().cloned().zip(cols.into_iter().map(|j| ck[j].clone())).collect() };
    let stream: Box<dyn Iterator<Item = BTreeMap<String, String>>> = match model {
        Some(m) => {
            let probs = predict_mapping(b, c, &m.inner).map_err(value_err)?.probs;
            Box::new(enumerate_mappings(&probs).map(move |(cols, _)| to_map(cols)))
        }
        None => Box::new(uniform_mappings(bk.len(), ck.len(), seed).map(to_map)),
    };
    let cfg = RepairConfig {
        budget: Duration::from_secs_f64(budget),
        scratch_dir: debug_dir,
        ..RepairConfig::default()
    };
    let out = repair_since(start, b, c, stream, &suite, &cfg);
    let d = PyDict::new(py);
    d.set_item("status", out.status.name())?;
    d.set_item("fixed_source", out.fixed_source)?;
    d.set_item("fixed_by", out.fixed_by.map(|(bug, edit)| (bug.name(), edit)))?;
    d.set_item("mappings_tried", out.mappings_tried)?;
    d.set_item("candidates_tried", out.candidates_tried)?;
    d.set_item("elapsed", out.elapsed)?;
    Ok(d)
}

/// Shared pairs divided by the domain size.
#[pyfunction]
fn overlap_coefficient(a: BTreeMap<String, String>, b: BTreeMap<String, String>) -> PyResult<f64> {
    overlap(&a, &b).map_err(value_err)
}

/// Writes the pair dataset of a corpus (the bundled one by default) as
/// JSON lines and returns the number of records.
#[pyfunction]
#[pyo3(signature = (out, seed = 0, corpus = None))]
fn generate_dataset(out: &str, seed: u64, corpus: Option<&str>) -> PyResult<usize> {
    let corpus = match corpus {
        Some(dir) => Corpus::load(Path::new(dir)),
        None => Corpus::bundled(),
    }
    .map_err(value_err)?;
    let data = generate(&corpus, &DatasetConfig { seed, ..DatasetConfig::default() }).map_err(value_err)?;
    data.write_jsonl(Path::new(out)).map_err(|e| PyIOError::new_err(e.to_string()))?;
    Ok(data.records.len())
}

/// Trains on the train split of a dataset file and returns the mean loss
/// of every epoch.
#[pyfunction]
#[pyo3(signature = (data, epochs = 20, hidden = 64, seed = 0, max_pairs = None))]
fn train(py: Python<'_>, data: &str, epochs: usize, hidden: usize, seed: u64, max_pairs: Option<usize>) -> PyResult<(Model, Vec<f64>)> {
    let ds = Dataset::read_jsonl(Path::new(data)).map_err(value_err)?;
    let mut pairs = ds.training_pairs(Split::Train).map_err(value_err)?;
    if let Some(n) = max_pairs {
        pairs.truncate(n);
    }
    let cfg = TrainConfig {
        epochs,
        seed,
        model: ModelConfig { hidden, ..ModelConfig::default() },
        ..TrainConfig::default()
    };
    let (model, losses) = py.detach(|| {
        let mut losses = Vec::new();
        train_model(&pairs, &[], &cfg, |log| losses.push(log.mean_loss)).map(|m| (m, losses))
    })
    .map_err(value_err)?;
    Ok((Model { inner: model }, losses))
}

#[pymodule]
fn pyvarmap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(repair, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    Ok(())
}
