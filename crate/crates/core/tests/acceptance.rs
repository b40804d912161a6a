//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use varmap::corpus::Corpus;
use varmap::graph::EdgeSetConfig;
use varmap::harness::{evaluate_mappings, evaluate_repair, Method, RepairEvalConfig, RepairSection};
use varmap::lang::{parse, run_test_suite, DEFAULT_STEP_LIMIT};
use varmap::mapper::{enumerate_mappings, predict_mapping, train, ModelConfig, ModelParams, TrainConfig};
use varmap::mutate::{generate_dataset, BugType, Dataset, DatasetConfig, DatasetRecord, Split};
use varmap::repair::{repair, RepairConfig, RepairStatus};
use varmap::selftest::{enumeration_mismatches, gradient_check, mutation_mismatches, rgcn_oracle_deviation};

const SEED: u64 = 0;

/// Pairs and per-pair budget of the ranking run.
const RANKING_BUDGET: Duration = varmap::repair::DEFAULT_BUDGET;

const COUNT_BUGGY: &str = r#"void loop(int j, int l) {
    while (l >= j) {
        printf("%d\n", j);
        ++j;
    }
}

int main() {
    int j, l;
    scanf("%d", &l);
    loop(j, l);
    return 0;
}
"#;

const COUNT_CORRECT: &str = r#"int main() {
    int n, i;
    scanf("%d", &n);
    for (i = 1; i <= n; i++) {
        printf("%d\n", i);
    }
    return 0;
}
"#;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Shared {
    corpus: Corpus,
    data: Dataset,
    model: Option<ModelParams>,
    exact_all_edges: Option<f64>,
}

fn train_model(data: &Dataset, edges: EdgeSetConfig) -> ModelParams {
    let pairs = data.training_pairs(Split::Train).unwrap();
    let cfg = TrainConfig {
        seed: SEED,
        model: ModelConfig { edges, ..ModelConfig::default() },
        ..TrainConfig::default()
    };
    train(&pairs, &[], &cfg, |_| {}).unwrap()
}

fn rgcn_oracle() -> Outcome {
    let t = Instant::now();
    let dev = rgcn_oracle_deviation(50, SEED);
    let secs = t.elapsed().as_secs_f64();
    outcome(dev < 1e-9 && secs < 10.0, format!("max abs deviation {dev:.2e} over 50 graphs"))
}

fn gradients() -> Outcome {
    let t = Instant::now();
    let err = gradient_check(10, SEED);
    let secs = t.elapsed().as_secs_f64();
    outcome(err < 1e-4 && secs < 60.0, format!("worst relative error {err:.2e} over 10 instances"))
}

fn enumeration() -> Outcome {
    let t = Instant::now();
    let bad = enumeration_mismatches(100, SEED);
    let secs = t.elapsed().as_secs_f64();
    outcome(bad == 0 && secs < 5.0, format!("{bad} of 100 matrices out of order"))
}

fn preservation(s: &Shared) -> Outcome {
    let t = Instant::now();
    let (bad, checked) = mutation_mismatches(&s.corpus, SEED);
    let secs = t.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 120.0, format!("{} of {checked} mutants changed behaviour", bad.len()))
}

fn oracle_closure(s: &Shared) -> Outcome {
    let section = evaluate_repair(&s.corpus, &s.data.records, Split::Eval, Method::Oracle, None, &RepairEvalConfig::default()).unwrap();
    let rate = |b: BugType| {
        let c = &section.per_bug_type[b.name()];
        c.fixed as f64 / c.pairs as f64
    };
    let (wco, vm, me) = (rate(BugType::Wco), rate(BugType::Vm), rate(BugType::Me));
    outcome(
        wco == 1.0 && vm >= 0.95 && me >= 0.90,
        format!("fixed wco {wco:.4}, vm {vm:.4}, me {me:.4} of {} eval pairs", section.counts.pairs),
    )
}

fn learning(s: &mut Shared) -> Outcome {
    let t = Instant::now();
    let model = train_model(&s.data, EdgeSetConfig::all());
    let secs = t.elapsed().as_secs_f64();
    let report = evaluate_mappings(&model, &s.data.records, Split::Eval, 1).unwrap();
    let o = &report.overall;
    s.exact_all_edges = Some(o.exact_rate);
    s.model = Some(model);
    outcome(
        o.exact_rate >= 0.90 && o.mean_overlap >= 0.95 && secs < 1800.0,
        format!("exact {:.4}, overlap {:.4} on {} eval pairs, trained in {secs:.0} s", o.exact_rate, o.mean_overlap, o.pairs),
    )
}

fn ranking(s: &Shared) -> Outcome {
    let Some(model) = &s.model else {
        return outcome(false, "no trained model".into());
    };
    let eval: Vec<DatasetRecord> = s.data.split(Split::Eval).cloned().collect();
    let cfg = RepairEvalConfig { budget: RANKING_BUDGET, seed: SEED, ..RepairEvalConfig::default() };
    let run = |m: Method| -> RepairSection { evaluate_repair(&s.corpus, &eval, Split::Eval, m, Some(model), &cfg).unwrap() };
    let (gnn, uniform) = (run(Method::Gnn), run(Method::Uniform));
    outcome(
        gnn.fixed_rate > uniform.fixed_rate && uniform.counts.timeout > gnn.counts.timeout,
        format!(
            "gnn fixed {}/{} timeouts {}, uniform fixed {}/{} timeouts {} ({}s budget)",
            gnn.counts.fixed,
            gnn.counts.pairs,
            gnn.counts.timeout,
            uniform.counts.fixed,
            uniform.counts.pairs,
            uniform.counts.timeout,
            RANKING_BUDGET.as_secs()
        ),
    )
}

fn ablation(s: &Shared) -> Outcome {
    let Some(full) = s.exact_all_edges else {
        return outcome(false, "no all-edges result".into());
    };
    let model = train_model(&s.data, EdgeSetConfig::from_indices(&[1, 2, 3, 4]).unwrap());
    let report = evaluate_mappings(&model, &s.data.records, Split::Eval, 1).unwrap();
    let without = report.overall.exact_rate;
    let drop = (full - without) * 100.0;
    outcome(drop >= 20.0, format!("exact {full:.4} with ast edges, {without:.4} without: drop {drop:.1} points"))
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_varmap")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    fs::read(a).ok().is_some_and(|x| fs::read(b).ok().is_some_and(|y| x == y))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let s = |path: &Path| path.to_str().unwrap().to_string();
    let run = || -> Result<Vec<(&'static str, bool)>, String> {
        for d in ["a.jsonl", "b.jsonl"] {
            cli(&["gen", "--out", &s(&p(d)), "--seed", "1"])?;
        }
        for m in ["a.ckpt", "b.ckpt"] {
            cli(&["train", "--data", &s(&p("a.jsonl")), "--out", &s(&p(m)), "--epochs", "2", "--max-pairs", "150", "--seed", "1"])?;
        }
        for r in ["a.json", "b.json"] {
            cli(&["eval-map", "--data", &s(&p("a.jsonl")), "--model", &s(&p("a.ckpt")), "--out", &s(&p(r))])?;
        }
        Ok(vec![
            ("dataset", same_bytes(&p("a.jsonl"), &p("b.jsonl"))),
            ("manifest", same_bytes(&p("a.jsonl.manifest.json"), &p("b.jsonl.manifest.json"))),
            ("checkpoint", same_bytes(&p("a.ckpt"), &p("b.ckpt"))),
            ("report", same_bytes(&p("a.json"), &p("b.json"))),
        ])
    };
    match run() {
        Ok(checks) => {
            let differing: Vec<&str> = checks.iter().filter(|(_, same)| !same).map(|(n, _)| *n).collect();
            let detail = if differing.is_empty() {
                "dataset, manifest, checkpoint and report identical across runs".to_string()
            } else {
                format!("differing files: {}", differing.join(", "))
            };
            outcome(differing.is_empty(), detail)
        }
        Err(e) => outcome(false, format!("command failed: {e}")),
    }
}

fn smoke(s: &Shared) -> Outcome {
    let Some(model) = &s.model else {
        return outcome(false, "no trained model".into());
    };
    let start = Instant::now();
    let (buggy, correct) = (parse(COUNT_BUGGY).unwrap(), parse(COUNT_CORRECT).unwrap());
    let suite = &s.corpus.assignment("ipa05").unwrap().suite;
    let mapping = predict_mapping(&buggy, &correct, model).unwrap();
    let mut by_name = BTreeMap::new();
    for (key, target) in mapping.pairs() {
        let name = key.rsplit("::").next().unwrap().to_string();
        by_name.entry(name).or_insert_with(Vec::new).push(target.to_string());
    }
    let expected = [("j", "i"), ("l", "n")];
    let mapped = by_name.len() == 2
        && expected.iter().all(|(b, c)| by_name.get(*b).is_some_and(|ts| ts.iter().all(|t| t == c)));

    let keys = mapping.buggy_vars.clone();
    let cols = mapping.correct_vars.clone();
    let stream = enumerate_mappings(&mapping.probs)
        .map(move |(a, _)| keys.iter().cloned().zip(a.into_iter().map(|c| cols[c].clone())).collect::<BTreeMap<_, _>>());
    let out = repair(&buggy, &correct, stream, suite, &RepairConfig::default());
    let secs = start.elapsed().as_secs_f64();
    let fixed = out.status == RepairStatus::Fixed
        && out.fixed_source.as_deref().is_some_and(|src| {
            src.contains("j = 1;") && run_test_suite(&parse(src).unwrap(), suite, DEFAULT_STEP_LIMIT).all_passed()
        });
    outcome(
        mapped && fixed && secs < 60.0,
        format!("mapping {by_name:?}, repair {} after {} mapping(s) in {secs:.3} s", out.status.name(), out.mappings_tried),
    )
}

fn main() -> ExitCode {
    let corpus = Corpus::bundled().unwrap();
    let data = generate_dataset(&corpus, &DatasetConfig { seed: SEED, ..DatasetConfig::default() }).unwrap();
    let mut shared = Shared { corpus, data, model: None, exact_all_edges: None };

    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut(&mut Shared) -> Outcome, shared: &mut Shared| {
        let t = Instant::now();
        let o = f(shared);
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict} [{name}] {} ({:.1} s)", o.detail, t.elapsed().as_secs_f64());
        failed += !o.passed as usize;
    };
    report(1, "rgcn dense oracle", &mut |_| rgcn_oracle(), &mut shared);
    report(2, "gradient check", &mut |_| gradients(), &mut shared);
    report(3, "enumeration order", &mut |_| enumeration(), &mut shared);
    report(4, "mutation preservation", &mut |s| preservation(s), &mut shared);
    report(5, "oracle repair closure", &mut |s| oracle_closure(s), &mut shared);
    report(6, "end-to-end learning", &mut learning, &mut shared);
    report(7, "repair ranking", &mut |s| ranking(s), &mut shared);
    report(8, "ast edge ablation", &mut |s| ablation(s), &mut shared);
    report(9, "determinism", &mut |_| determinism(), &mut shared);
    report(10, "helper-function smoke test", &mut |s| smoke(s), &mut shared);
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
