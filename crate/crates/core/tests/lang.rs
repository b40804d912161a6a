use proptest::prelude::*;
use varmap::lang::{
    interpret, parse, pretty_print, rename_variables, run_test_suite, Direction, Renaming, Status, TestCase, TestSuite,
    DEFAULT_STEP_LIMIT,
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
    }
}

int main() {
    int j, l;
    scanf("%d", &l);
    loop(j, l);
    return 0;
}
"#;

fn counting_suite() -> TestSuite {
    TestSuite::new(
        [1, 3, 5]
            .iter()
            .map(|&n| TestCase {
                input: format!("{n}\n"),
                expected: (1..=n).map(|i| format!("{i}\n")).collect(),
            })
            .collect(),
    )
    .unwrap()
}

const VARS: [&str; 4] = ["a", "b", "c", "x"];

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i32..100).prop_map(|n| n.to_string()),
        prop::sample::select(&VARS[..]).prop_map(str::to_string),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let ops = prop::sample::select(&["+", "-", "*", "<", "<=", ">", ">=", "==", "!=", "&&", "||"][..]);
        prop_oneof![
            (inner.clone(), ops, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.clone().prop_map(|e| format!("(-{e})")),
            inner.prop_map(|e| format!("(!{e})")),
        ]
    })
}

fn stmt() -> impl Strategy<Value = String> {
    let var = || prop::sample::select(&VARS[..]);
    let simple = prop_oneof![
        (var(), expr()).prop_map(|(v, e)| format!("{v} = {e};")),
        (var(), expr()).prop_map(|(v, e)| format!("{v} += {e};")),
        var().prop_map(|v| format!("{v}++;")),
        var().prop_map(|v| format!("--{v};")),
        expr().prop_map(|e| format!("printf(\"%d\\n\", {e});")),
    ];
    simple.prop_recursive(3, 16, 3, |inner| {
        let block = prop::collection::vec(inner, 0..3).prop_map(|v| v.join(" "));
        prop_oneof![
            (expr(), block.clone()).prop_map(|(c, b)| format!("if ({c}) {{ {b} }}")),
            (expr(), block.clone(), block.clone()).prop_map(|(c, t, e)| format!("if ({c}) {{ {t} }} else {{ {e} }}")),
            (expr(), block.clone()).prop_map(|(c, b)| format!("while ({c}) {{ {b} break; }}")),
            (expr(), block).prop_map(|(c, b)| format!("for (x = 0; {c}; x++) {{ {b} }}")),
        ]
    })
}

fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(stmt(), 1..6).prop_map(|body| {
        format!(
            "int main() {{ int a = 1, b = 2, c = 3, x = 0; scanf(\"%d\", &a); {} return 0; }}",
            body.join(" ")
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printing_round_trips(src in program()) {
        let p = parse(&src).unwrap();
        let text = pretty_print(&p);
        let again = parse(&text).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(pretty_print(&again), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interpretation_is_deterministic(src in program(), input in -50i32..50) {
        let p = parse(&src).unwrap();
        let stdin = format!("{input}\n");
        prop_assert_eq!(interpret(&p, &stdin, 20_000), interpret(&p, &stdin, 20_000));
    }

    #[test]
    fn consistent_renaming_preserves_behaviour(src in program(), input in -50i32..50) {
        let p = parse(&src).unwrap();
        let targets: Vec<String> = (0..p.num_vars()).map(|d| format!("v{}", 7 * d + 3)).collect();
        let renaming = Renaming::new(&p, &targets).unwrap();
        let renamed = rename_variables(&p, &renaming, Direction::Forward).unwrap();
        let stdin = format!("{input}\n");
        let (before, after) = (interpret(&p, &stdin, 20_000), interpret(&renamed, &stdin, 20_000));
        prop_assert_eq!(before.stdout, after.stdout);
        prop_assert_eq!(before.status, after.status);
        let back = rename_variables(&renamed, &renaming, Direction::Reverse).unwrap();
        prop_assert_eq!(pretty_print(&back), pretty_print(&p));
    }

    #[test]
    fn collapsing_renaming_is_undone_exactly(src in program()) {
        let p = parse(&src).unwrap();
        let targets = vec!["q".to_string(); p.num_vars()];
        let renaming = Renaming::new(&p, &targets).unwrap();
        let renamed = rename_variables(&p, &renaming, Direction::Forward).unwrap();
        let names: std::collections::HashSet<&str> = renamed.vars.iter().map(|v| v.name.as_str()).collect();
        prop_assert_eq!(names.len(), p.num_vars());
        let back = rename_variables(&renamed, &renaming, Direction::Reverse).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn counting_program_prints_one_to_n() {
    let p = parse(COUNT_CORRECT).unwrap();
    let r = interpret(&p, "3\n", DEFAULT_STEP_LIMIT);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.stdout, "1\n2\n3\n");
    assert!(run_test_suite(&p, &counting_suite(), DEFAULT_STEP_LIMIT).all_passed());
}

#[test]
fn counting_program_with_helper_misses_two_statements() {
    let p = parse(COUNT_BUGGY).unwrap();
    assert_eq!(p.var_keys(), vec!["loop::j", "loop::l", "main::j", "main::l"]);
    // j is read before any write, so the loop guard compares against the sentinel
    let r = interpret(&p, "3\n", 100_000);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.stdout, "");
    assert!(r.uninit_read);
    assert!(!run_test_suite(&p, &counting_suite(), 100_000).all_passed());
}

#[test]
fn infinite_loop_hits_the_step_limit() {
    let p = parse("int main() { int i = 0; while (1) { i++; } return 0; }").unwrap();
    let r = interpret(&p, "", DEFAULT_STEP_LIMIT);
    assert_eq!(r.status, Status::StepLimitExceeded);
    assert!(r.steps >= DEFAULT_STEP_LIMIT);
}

#[test]
fn int_arithmetic_wraps() {
    let p = parse("int main() { int a = 2147483647; a = a + 1; printf(\"%d\\n\", a); return 0; }").unwrap();
    assert_eq!(interpret(&p, "", 1000).stdout, "-2147483648\n");
}
