use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use varmap::corpus::Corpus;
use varmap::graph::EdgeSetConfig;
use varmap::harness::{
    cactus_csv, evaluate_mappings, evaluate_repair, Method, RepairEvalConfig, RepairReport, REPORT_VERSION, TIMING_NOTE,
};
use varmap::lang::{parse, Program, TestSuite};
use varmap::mapper::{enumerate_mappings, predict_mapping, train, uniform_mappings, ModelConfig, ModelParams, TrainConfig};
use varmap::mutate::{generate_dataset, Dataset, DatasetConfig, DatasetRecord, Split};
use varmap::repair::{repair_since, RepairConfig};

#[derive(Parser)]
#[command(name = "varmap", version, about = "Variable mapping and mapping-driven repair for small C programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the pair dataset from a corpus.
    Gen {
        #[arg(long)]
        out: PathBuf,
        /// Corpus directory (defaults to the bundled one).
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mutated variants per program and configuration.
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Keep every failing injection.
        #[arg(long)]
        exhaustive: bool,
        /// Give buggy programs fresh variable names.
        #[arg(long)]
        rename: bool,
        #[arg(long, default_value_t = 0.2)]
        valid_fraction: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Train a mapping model.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long, default_value_t = 64)]
        hidden: usize,
        /// Enabled edge families: 0 ast, 1 sibling, 2 write, 3 read, 4 chronological.
        #[arg(long, default_value = "0,1,2,3,4")]
        edges: String,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        /// Use only the first N training pairs.
        #[arg(long)]
        max_pairs: Option<usize>,
    },
    /// Predict the variable mapping between two programs.
    Map {
        #[arg(long)]
        buggy: PathBuf,
        #[arg(long)]
        correct: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Repair a buggy program against a correct one and a test suite.
    Repair {
        #[arg(long)]
        buggy: PathBuf,
        #[arg(long)]
        correct: PathBuf,
        /// Directory of NN.in / NN.out files.
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Mapping source: gnn (needs --model) or uniform.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write every candidate tried to this directory.
        #[arg(long)]
        debug_dir: Option<PathBuf>,
        /// Write the repaired program here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mapping accuracy of a model on one dataset split.
    EvalMap {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "eval")]
        split: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair benchmark with several mapping sources.
    EvalRepair {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "gnn,uniform,oracle")]
        methods: String,
        #[arg(long, default_value = "eval")]
        split: String,
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Evenly spaced subsample of at most N pairs.
        #[arg(long)]
        max_pairs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cactus-plot data: program_id,method,seconds.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the reference checks.
    Selftest {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        CliError {
            kind,
            message: message.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::new("io", format!("{}: {e}", path.display()))
}

fn read_program(path: &Path) -> CliResult<Program> {
    let src = fs::read_to_string(path).map_err(io_err(path))?;
    parse(&src).map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))
}

fn load_corpus(dir: Option<&Path>) -> CliResult<Corpus> {
    match dir {
        Some(d) => Corpus::load(d),
        None => Corpus::bundled(),
    }
    .map_err(|e| CliError::new("corpus", e))
}

fn load_model(path: &Path) -> CliResult<ModelParams> {
    ModelParams::load(path).map_err(|e| CliError::new("model", e))
}

fn parse_split(s: &str) -> CliResult<Split> {
    Split::parse(s).ok_or_else(|| CliError::new("usage", format!("unknown split `{s}`")))
}

fn parse_edges(s: &str) -> CliResult<EdgeSetConfig> {
    let indices = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::new("usage", format!("bad edge index `{t}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    EdgeSetConfig::from_indices(&indices).map_err(|e| CliError::new("usage", e))
}

fn budget(seconds: f64) -> CliResult<Duration> {
    if seconds.is_finite() && seconds > 0.0 {
        Ok(Duration::from_secs_f64(seconds))
    } else {
        Err(CliError::new("usage", "budget must be a positive number of seconds"))
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn read_dataset(path: &Path) -> CliResult<Dataset> {
    Dataset::read_jsonl(path).map_err(|e| CliError::new("dataset", e))
}

/// Buggy names mapped to correct names, falling back to declaration keys
/// for names whose declarations disagree.
fn by_name(buggy: &Program, correct: &Program, keys: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    let buggy_keys = buggy.var_keys();
    let correct_keys = correct.var_keys();
    let correct_name = |key: &str| {
        let i = correct_keys.iter().position(|k| k == key).expect("mapped onto a correct key");
        correct.vars[i].name.clone()
    };
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (d, v) in buggy.vars.iter().enumerate() {
        groups.entry(v.name.as_str()).or_default().push(d);
    }
    let mut out = BTreeMap::new();
    for (name, decls) in groups {
        let targets: Vec<String> = decls.iter().map(|&d| correct_name(&keys[&buggy_keys[d]])).collect();
        if targets.windows(2).all(|w| w[0] == w[1]) {
            out.insert(name.to_string(), targets[0].clone());
        } else {
            for (&d, t) in decls.iter().zip(targets) {
                out.insert(buggy_keys[d].clone(), t);
            }
        }
    }
    out
}

fn pick_evenly(records: Vec<DatasetRecord>, split: Split, max: Option<usize>) -> Vec<DatasetRecord> {
    let chosen: Vec<DatasetRecord> = records.into_iter().filter(|r| r.split == split).collect();
    match max {
        Some(n) if n < chosen.len() => {
            let len = chosen.len();
            (0..n).map(|i| chosen[i * len / n].clone()).collect()
        }
        _ => chosen,
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen {
            out,
            corpus,
            seed,
            samples,
            exhaustive,
            rename,
            valid_fraction,
            threads,
        } => {
            let corpus = load_corpus(corpus.as_deref())?;
            if !(0.0..1.0).contains(&valid_fraction) {
                return Err(CliError::new("usage", "valid fraction must be in [0, 1)"));
            }
            let cfg = DatasetConfig {
                seed,
                per_config_samples: samples,
                exhaustive,
                rename_buggy: rename,
                valid_fraction,
                threads,
                ..DatasetConfig::default()
            };
            let ds = generate_dataset(&corpus, &cfg).map_err(|e| CliError::new("gen", e))?;
            ds.write_jsonl(&out).map_err(|e| CliError::new("io", e))?;
            let manifest = ds.manifest(&corpus, &cfg).map_err(|e| CliError::new("io", e))?;
            let mpath = PathBuf::from(format!("{}.manifest.json", out.display()));
            fs::write(&mpath, to_pretty(&manifest)).map_err(io_err(&mpath))?;
            println!(
                "{}",
                json!({"records": manifest.records, "per_split": manifest.per_split, "per_bug_type": manifest.per_bug_type})
            );
        }
        Command::Train {
            data,
            out,
            seed,
            epochs,
            hidden,
            edges,
            lr,
            max_pairs,
        } => {
            let ds = read_dataset(&data)?;
            let mut train_pairs = ds.training_pairs(Split::Train).map_err(|e| CliError::new("dataset", e))?;
            if let Some(n) = max_pairs {
                train_pairs.truncate(n);
            }
            let valid = ds.training_pairs(Split::Valid).map_err(|e| CliError::new("dataset", e))?;
            let mut cfg = TrainConfig {
                epochs,
                seed,
                model: ModelConfig {
                    hidden,
                    edges: parse_edges(&edges)?,
                    ..ModelConfig::default()
                },
                ..TrainConfig::default()
            };
            cfg.adam.lr = lr;
            let mut logs = Vec::new();
            let model = train(&train_pairs, &valid, &cfg, |e| {
                eprintln!("{}", serde_json::to_string(e).unwrap());
                logs.push(e.clone());
            })
            .map_err(|e| CliError::new("train", e))?;
            model.save(&out).map_err(|e| CliError::new("io", e))?;
            println!("{}", json!({"train_pairs": train_pairs.len(), "valid_pairs": valid.len(), "epochs": logs}));
        }
        Command::Map { buggy, correct, model } => {
            let model = load_model(&model)?;
            let (b, c) = (read_program(&buggy)?, read_program(&correct)?);
            let m = predict_mapping(&b, &c, &model).map_err(|e| CliError::new("map", e))?;
            let keys = m.to_map();
            let probabilities: BTreeMap<&str, BTreeMap<&str, f64>> = m
                .buggy_vars
                .iter()
                .enumerate()
                .map(|(i, bv)| {
                    let row = m.correct_vars.iter().enumerate().map(|(j, cv)| (cv.as_str(), m.probs[[i, j]])).collect();
                    (bv.as_str(), row)
                })
                .collect();
            let out = json!({
                "mapping": by_name(&b, &c, &keys),
                "keys": keys,
                "probabilities": probabilities,
                "log_likelihood": m.log_likelihood,
            });
            println!("{}", to_pretty(&out));
        }
        Command::Repair {
            buggy,
            correct,
            suite,
            model,
            method,
            budget: seconds,
            seed,
            debug_dir,
            out,
        } => {
            let (b, c) = (read_program(&buggy)?, read_program(&correct)?);
            let suite = TestSuite::load_dir(&suite).map_err(|e| CliError::new("suite", e))?;
            let method = match method.as_deref() {
                Some(s) => Method::parse(s).ok_or_else(|| CliError::new("usage", format!("unknown method `{s}`")))?,
                None if model.is_some() => Method::Gnn,
                None => Method::Uniform,
            };
            let model = model.as_deref().map(load_model).transpose()?;
            let cfg = RepairConfig {
                budget: budget(seconds)?,
                scratch_dir: debug_dir,
                ..RepairConfig::default()
            };
            let start = std::time::Instant::now();
            let (bk, ck) = (b.var_keys(), c.var_keys());
            let to_map = |cols: Vec<usize>| -> BTreeMap<String, String> {
                bk.iter().cloned().zip(cols.into_iter().map(|j| ck[j].clone())).collect()
            };
            let stream: Box<dyn Iterator<Item = BTreeMap<String, String>>> = match method {
                Method::Gnn => {
                    let model = model.as_ref().ok_or_else(|| CliError::new("usage", "method gnn needs --model"))?;
                    let m = predict_mapping(&b, &c, model).map_err(|e| CliError::new("map", e))?;
                    Box::new(enumerate_mappings(&m.probs).map(move |(cols, _)| to_map(cols)))
                }
                Method::Uniform => Box::new(uniform_mappings(bk.len(), ck.len(), seed).map(to_map)),
                Method::Oracle => return Err(CliError::new("usage", "method oracle needs a dataset; use eval-repair")),
            };
            let outcome = repair_since(start, &b, &c, stream, &suite, &cfg);
            if let (Some(p), Some(src)) = (&out, &outcome.fixed_source) {
                fs::write(p, src).map_err(io_err(p))?;
            }
            println!("{}", to_pretty(&outcome));
        }
        Command::EvalMap {
            data,
            model,
            split,
            threads,
            out,
        } => {
            let model = load_model(&model)?;
            let ds = read_dataset(&data)?;
            let report =
                evaluate_mappings(&model, &ds.records, parse_split(&split)?, threads).map_err(|e| CliError::new("eval", e))?;
            write_or_print(out.as_deref(), &to_pretty(&report))?;
        }
        Command::EvalRepair {
            data,
            corpus,
            model,
            methods,
            split,
            budget: seconds,
            seed,
            threads,
            max_pairs,
            out,
            csv,
        } => {
            let corpus = load_corpus(corpus.as_deref())?;
            let split = parse_split(&split)?;
            let model = model.as_deref().map(load_model).transpose()?;
            let records = pick_evenly(read_dataset(&data)?.records, split, max_pairs);
            let cfg = RepairEvalConfig {
                budget: budget(seconds)?,
                seed,
                threads,
                ..RepairEvalConfig::default()
            };
            let mut sections = Vec::new();
            for name in methods.split(',').filter(|s| !s.is_empty()) {
                let method = Method::parse(name).ok_or_else(|| CliError::new("usage", format!("unknown method `{name}`")))?;
                let s = evaluate_repair(&corpus, &records, split, method, model.as_ref(), &cfg)
                    .map_err(|e| CliError::new("eval", e))?;
                sections.push(s);
            }
            if let Some(p) = &csv {
                fs::write(p, cactus_csv(&sections)).map_err(io_err(p))?;
            }
            let report = RepairReport {
                version: REPORT_VERSION,
                split,
                budget_seconds: seconds,
                timing: TIMING_NOTE.to_string(),
                methods: sections,
            };
            write_or_print(out.as_deref(), &to_pretty(&report))?;
        }
        Command::Selftest { corpus, seed } => {
            let corpus = load_corpus(corpus.as_deref())?;
            let results = varmap::selftest::run_all(&corpus, seed);
            for r in &results {
                println!("{}", serde_json::to_string(r).unwrap());
            }
            if let Some(bad) = results.iter().find(|r| !r.passed) {
                return Err(CliError::new("selftest", format!("{} failed: {}", bad.name, bad.detail)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err: Value = json!({"error": {"kind": "usage", "message": e.to_string().trim()}});
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({"error": {"kind": e.kind, "message": e.message}}));
            ExitCode::FAILURE
        }
    }
}
