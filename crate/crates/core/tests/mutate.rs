use std::collections::BTreeSet;

use varmap::corpus::Corpus;
use varmap::lang::ast::Stmt;
use varmap::lang::suite::fails_some_test;
use varmap::lang::{parse, pretty_print, rename_variables, run_test_suite, Direction, Renaming, DEFAULT_STEP_LIMIT};
use varmap::mutate::{apply_config, for_to_while, generate_dataset, mirror_comparisons, DatasetConfig, MutationConfig};

fn small_corpus() -> Corpus {
    let mut c = Corpus::bundled().unwrap();
    c.assignments.truncate(3);
    c
}

#[test]
fn every_configuration_preserves_suite_outcomes() {
    let corpus = Corpus::bundled().unwrap();
    for (a, p) in corpus.programs() {
        let before: Vec<bool> = a
            .suite
            .cases()
            .iter()
            .map(|c| run_test_suite(&p.program, &varmap::lang::TestSuite::new(vec![c.clone()]).unwrap(), DEFAULT_STEP_LIMIT).all_passed())
            .collect();
        for cfg in MutationConfig::all() {
            for seed in [0, 17] {
                let out = apply_config(&p.program, cfg, seed);
                let after: Vec<bool> = a
                    .suite
                    .cases()
                    .iter()
                    .map(|c| run_test_suite(&out.program, &varmap::lang::TestSuite::new(vec![c.clone()]).unwrap(), DEFAULT_STEP_LIMIT).all_passed())
                    .collect();
                assert_eq!(before, after, "{} config {} seed {seed}", p.id, cfg.id());
                assert_eq!(parse(&pretty_print(&out.program)).unwrap(), out.program);
            }
        }
    }
}

#[test]
fn loop_bound_is_mirrored() {
    let p = parse("int main() { int n, i; scanf(\"%d\", &n); for (i = 1; i <= n; i++) { printf(\"%d\\n\", i); } return 0; }").unwrap();
    let text = pretty_print(&mirror_comparisons(&p).unwrap());
    assert!(text.contains("n >= i"), "{text}");
    assert!(!text.contains("i <= n"));
}

#[test]
fn counting_for_loop_becomes_a_while_loop() {
    let p = parse("int main() { int n, i; scanf(\"%d\", &n); for (i = 1; i <= n; i++) { printf(\"%d\\n\", i); } return 0; }").unwrap();
    let q = for_to_while(&p).unwrap();
    let body = &q.functions[0].body.stmts;
    assert!(body.iter().any(|s| matches!(s, Stmt::While { .. })));
    assert!(!body.iter().any(|s| matches!(s, Stmt::For { .. })));
    let text = pretty_print(&q);
    assert!(text.contains("i = 1;") && text.contains("while (i <= n)"), "{text}");
}

#[test]
fn generated_pairs_are_effective_and_correctly_labelled() {
    let corpus = small_corpus();
    for rename_buggy in [false, true] {
        let cfg = DatasetConfig { rename_buggy, ..DatasetConfig::default() };
        let data = generate_dataset(&corpus, &cfg).unwrap();
        assert!(data.records.len() <= corpus.programs().count() * 31 * 3);
        assert!(data.records.len() > 100);
        for r in &data.records {
            let suite = &corpus.assignment(&r.ipa_id).unwrap().suite;
            let pair = r.to_pair().unwrap();
            assert!(fails_some_test(&pair.buggy, suite, DEFAULT_STEP_LIMIT), "{}", r.bug);
            assert!(run_test_suite(&pair.correct, suite, DEFAULT_STEP_LIMIT).all_passed());

            // the ground truth renames the buggy side onto the correct side's names
            let keys = pair.buggy.var_keys();
            let correct_names: Vec<String> = pair.correct.vars.iter().map(|v| v.name.clone()).collect();
            let correct_keys = pair.correct.var_keys();
            let targets: Vec<String> = keys
                .iter()
                .map(|k| correct_names[correct_keys.iter().position(|c| c == &r.mapping[k]).unwrap()].clone())
                .collect();
            let renaming = Renaming::new(&pair.buggy, &targets).unwrap();
            assert!(renaming.disambiguated().is_empty());
            let renamed = rename_variables(&pair.buggy, &renaming, Direction::Forward).unwrap();
            let got: BTreeSet<&str> = renamed.vars.iter().map(|v| v.name.as_str()).collect();
            let want: BTreeSet<&str> = correct_names.iter().map(String::as_str).collect();
            assert_eq!(got, want);
            if !rename_buggy {
                assert!(r.mapping.iter().all(|(b, c)| b == c));
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_dataset_bytes() {
    let corpus = small_corpus();
    let cfg = DatasetConfig { seed: 5, ..DatasetConfig::default() };
    let a = generate_dataset(&corpus, &cfg).unwrap().to_jsonl();
    let b = generate_dataset(&corpus, &DatasetConfig { threads: 3, ..cfg.clone() }).unwrap().to_jsonl();
    assert_eq!(a, b);
    let c = generate_dataset(&corpus, &DatasetConfig { seed: 6, ..cfg }).unwrap().to_jsonl();
    assert_ne!(a, c);
}
