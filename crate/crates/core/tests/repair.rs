use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use varmap::corpus::Corpus;
use varmap::lang::visit::var_refs;
use varmap::lang::{parse, parse_expr, pretty_print, print_expr, run_test_suite, Program, DEFAULT_STEP_LIMIT};
use varmap::mutate::{generate_dataset, BugType, DatasetConfig, Split};
use varmap::repair::{
    mirrored_expression, repair, repair_me, repair_vm, repair_wco, CmpMultiset, RepairConfig, RepairStatus,
};

const COUNT_CORRECT: &str = r#"int main() {
    int n, i;
    scanf("%d", &n);
    for (i = 1; i <= n; i++) {
        printf("%d\n", i);
    }
    return 0;
}
"#;

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

fn fig_mapping() -> BTreeMap<String, String> {
    [("loop::j", "i"), ("loop::l", "n"), ("main::j", "i"), ("main::l", "n")]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn identity(p: &Program) -> BTreeMap<String, String> {
    p.var_keys().into_iter().map(|k| (k.clone(), k)).collect()
}

fn identifiers(p: &Program) -> BTreeSet<String> {
    var_refs(p).into_iter().map(|(r, _)| r.name).chain(p.vars.iter().map(|v| v.name.clone())).collect()
}

fn sources(c: Vec<varmap::repair::RepairCandidate>) -> Vec<String> {
    c.iter().map(|c| pretty_print(&c.program)).collect()
}

#[test]
fn mirroring_swaps_sides_and_operator() {
    let e = parse_expr("i <= n").unwrap();
    let m = mirrored_expression(&e).unwrap();
    assert_eq!(print_expr(&m), "n >= i");
    assert_eq!(mirrored_expression(&m).unwrap(), e);
    assert_eq!(print_expr(&mirrored_expression(&parse_expr("a == b").unwrap()).unwrap()), "b == a");
}

#[test]
fn mirrored_comparisons_share_a_key() {
    let a = parse("int main() { int i, n; if (i <= n) { i = 1; } return 0; }").unwrap();
    let b = parse("int main() { int i, n; if (n >= i) { i = 1; } return 0; }").unwrap();
    assert_eq!(CmpMultiset::of(&a), CmpMultiset::of(&b));
    assert_eq!(CmpMultiset::of(&a).len(), 1);
}

#[test]
fn wrong_operator_is_replaced_by_the_mirrored_correct_one() {
    let correct = parse(&COUNT_CORRECT.replace("i <= n", "n >= i")).unwrap();
    let buggy = parse(&COUNT_CORRECT.replace("i <= n", "i < n")).unwrap();
    let got = sources(repair_wco(&buggy, &correct, &identity(&buggy)));
    assert!(got.iter().any(|s| s.contains("i <= n")), "{got:?}");
}

#[test]
fn identical_programs_yield_no_candidates() {
    let p = parse(COUNT_CORRECT).unwrap();
    let m = identity(&p);
    assert!(repair_wco(&p, &p, &m).is_empty());
    assert!(repair_vm(&p, &p, &m).is_empty());
    assert!(repair_me(&p, &p, &m).is_empty());
}

#[test]
fn helper_function_program_is_fixed_by_the_missing_initialisation() {
    let corpus = Corpus::bundled().unwrap();
    let suite = &corpus.assignment("ipa05").unwrap().suite;
    let correct = parse(COUNT_CORRECT).unwrap();
    let buggy = parse(COUNT_BUGGY).unwrap();
    assert!(!run_test_suite(&buggy, suite, DEFAULT_STEP_LIMIT).all_passed());

    let me = sources(repair_me(&buggy, &correct, &fig_mapping()));
    assert!(me.iter().any(|s| s.contains("j = 1;")));

    let out = repair(&buggy, &correct, [fig_mapping()], suite, &RepairConfig::default());
    assert_eq!(out.status, RepairStatus::Fixed);
    assert_eq!(out.mappings_tried, 1);
    let fixed = out.fixed_source.unwrap();
    assert!(fixed.contains("j = 1;"), "{fixed}");
    assert!(run_test_suite(&parse(&fixed).unwrap(), suite, DEFAULT_STEP_LIMIT).all_passed());
    assert_eq!(out.fixed_by.unwrap().0, BugType::Me);
}

#[test]
fn candidates_keep_the_buggy_identifiers_and_are_deterministic() {
    let correct = parse(COUNT_CORRECT).unwrap();
    let buggy = parse(COUNT_BUGGY).unwrap();
    let allowed = identifiers(&buggy);
    for gen in [repair_wco, repair_vm, repair_me] {
        let first = gen(&buggy, &correct, &fig_mapping());
        for c in &first {
            let text = pretty_print(&c.program);
            assert_eq!(parse(&text).unwrap(), c.program);
            assert!(identifiers(&c.program).is_subset(&allowed), "{text}");
        }
        assert_eq!(sources(first), sources(gen(&buggy, &correct, &fig_mapping())));
    }
}

#[test]
fn variable_misuse_candidates_respect_the_bound() {
    let correct = parse(COUNT_CORRECT).unwrap();
    let buggy = parse(&COUNT_CORRECT.replace("printf(\"%d\\n\", i)", "printf(\"%d\\n\", n)")).unwrap();
    let got = sources(repair_vm(&buggy, &correct, &identity(&buggy)));
    // one over-used name, one under-used name, two reads of n
    assert!(!got.is_empty() && got.len() <= 2, "{got:?}");
    assert!(got.iter().any(|s| s.contains("printf(\"%d\\n\", i)")));
}

#[test]
fn ground_truth_mappings_fix_generated_pairs() {
    let mut corpus = Corpus::bundled().unwrap();
    corpus.assignments.truncate(4);
    let data = generate_dataset(&corpus, &DatasetConfig::default()).unwrap();
    let mut fixed = BTreeMap::new();
    let mut total = BTreeMap::new();
    for r in data.split(Split::Eval).step_by(2) {
        let pair = r.to_pair().unwrap();
        let suite = &corpus.assignment(&r.ipa_id).unwrap().suite;
        let out = repair(&pair.buggy, &pair.correct, [r.mapping.clone()], suite, &RepairConfig::default());
        *total.entry(r.bug_type).or_insert(0) += 1;
        if out.status == RepairStatus::Fixed {
            *fixed.entry(r.bug_type).or_insert(0) += 1;
            let prog = parse(out.fixed_source.as_deref().unwrap()).unwrap();
            assert!(run_test_suite(&prog, suite, DEFAULT_STEP_LIMIT).all_passed());
        }
    }
    assert_eq!(fixed.get(&BugType::Wco), total.get(&BugType::Wco));
    for bug in [BugType::Vm, BugType::Me] {
        let (f, t) = (fixed.get(&bug).copied().unwrap_or(0), total[&bug]);
        assert!(f as f64 >= 0.9 * t as f64, "{bug:?} {f}/{t}");
    }
}

#[test]
fn exhausted_budget_reports_timeout() {
    let corpus = Corpus::bundled().unwrap();
    let suite = &corpus.assignment("ipa05").unwrap().suite;
    let correct = parse(COUNT_CORRECT).unwrap();
    let buggy = parse(&COUNT_CORRECT.replace("; i++)", ";)")).unwrap();
    let cfg = RepairConfig { budget: Duration::from_millis(5), ..RepairConfig::default() };
    let out = repair(&buggy, &correct, std::iter::repeat(identity(&buggy)), suite, &cfg);
    assert_eq!(out.status, RepairStatus::Timeout);
    assert!(out.elapsed >= 0.005);
    assert!(out.fixed_source.is_none());
}
