use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::transform::{for_is_convertible, for_to_while_stmts};
use crate::lang::ast::*;
use crate::lang::suite::fails_some_test;
use crate::lang::visit::{for_each_expr_mut, for_each_var_ref_mut, var_refs, Role};
use crate::lang::{print_expr, print_stmt, TestSuite, DEFAULT_STEP_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BugType {
    Wco,
    Vm,
    Me,
}

impl BugType {
    pub const ALL: [BugType; 3] = [BugType::Wco, BugType::Vm, BugType::Me];

    pub fn name(self) -> &'static str {
        match self {
            BugType::Wco => "wco",
            BugType::Vm => "vm",
            BugType::Me => "me",
        }
    }

    pub fn parse(s: &str) -> Option<BugType> {
        BugType::ALL.into_iter().find(|b| b.name() == s)
    }
}

/// A single-site bug; `description` says what changed.
#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub bug_type: BugType,
    pub program: Program,
    pub description: String,
}

/// One candidate per comparison, with the operator replaced by a random
/// different comparison operator.
pub fn wco_candidates(program: &Program, rng: &mut impl Rng) -> Vec<Injection> {
    let mut sites = 0;
    let mut probe = program.clone();
    for_each_expr_mut(&mut probe, &mut |e| {
        if matches!(e, Expr::Binary { op, .. } if op.is_comparison()) {
            sites += 1;
        }
    });
    let mut out = Vec::new();
    for target in 0..sites {
        let mut p = program.clone();
        let mut k = 0;
        let mut description = String::new();
        let mut pick = |op: BinOp| {
            let others: Vec<BinOp> = BinOp::COMPARISONS.into_iter().filter(|&o| o != op).collect();
            *others.choose(rng).unwrap()
        };
        for_each_expr_mut(&mut p, &mut |e| {
            if let Expr::Binary { op, .. } = e {
                if op.is_comparison() {
                    if k == target {
                        let before = print_expr(e);
                        if let Expr::Binary { op, .. } = e {
                            *op = pick(*op);
                        }
                        description = format!("`{before}` -> `{}`", print_expr(e));
                    }
                    k += 1;
                }
            }
        });
        out.push(Injection {
            bug_type: BugType::Wco,
            program: p.resolved().expect("operator change keeps scoping"),
            description,
        });
    }
    out
}

/// One candidate per read occurrence, using another same-typed variable
/// of the enclosing function that is in scope there.
pub fn vm_candidates(program: &Program, rng: &mut impl Rng) -> Vec<Injection> {
    let refs = var_refs(program);
    let mut out = Vec::new();
    for (idx, (r, role)) in refs.iter().enumerate() {
        if *role != Role::Read {
            continue;
        }
        let info = &program.vars[r.decl];
        let mut names: Vec<&str> = program
            .vars
            .iter()
            .filter(|v| v.function == info.function && v.ty == info.ty && v.name != info.name)
            .map(|v| v.name.as_str())
            .collect();
        names.sort();
        names.dedup();
        names.shuffle(rng);
        for name in names {
            let mut p = program.clone();
            let mut k = 0;
            for_each_var_ref_mut(&mut p, &mut |vr, _| {
                if k == idx {
                    vr.name = name.to_string();
                }
                k += 1;
            });
            let Ok(p) = p.resolved() else { continue };
            let new_decl = var_refs(&p)[idx].0.decl;
            if p.vars[new_decl].ty == info.ty {
                out.push(Injection {
                    bug_type: BugType::Vm,
                    program: p,
                    description: format!("read #{idx} of `{}` -> `{name}`", r.name),
                });
                break;
            }
        }
    }
    out
}

/// One candidate per deletable expression: expression statements,
/// declaration initializers, and the init and step clauses of `for`
/// loops (the loop is first rewritten as a `while` when possible).
pub fn me_candidates(program: &Program) -> Vec<Injection> {
    let mut total = 0;
    let mut probe = program.clone();
    for f in &mut probe.functions {
        me_walk(&mut f.body, usize::MAX, &mut total);
    }
    let mut out = Vec::new();
    for target in 0..total {
        let mut p = program.clone();
        let mut k = 0;
        let mut description = None;
        for f in &mut p.functions {
            if let Some(d) = me_walk(&mut f.body, target, &mut k) {
                description = Some(d);
                break;
            }
        }
        if let (Some(description), Ok(p)) = (description, p.resolved()) {
            out.push(Injection {
                bug_type: BugType::Me,
                program: p,
                description,
            });
        }
    }
    out
}

fn me_walk(b: &mut Block, target: usize, k: &mut usize) -> Option<String> {
    let mut i = 0;
    while i < b.stmts.len() {
        match &mut b.stmts[i] {
            Stmt::Expr(_) => {
                if *k == target {
                    let s = b.stmts.remove(i);
                    return Some(format!("removed `{}`", print_stmt(&s).trim()));
                }
                *k += 1;
            }
            Stmt::Decl { vars, .. } => {
                for d in vars.iter_mut() {
                    if d.init.is_some() {
                        if *k == target {
                            let e = d.init.take().unwrap();
                            return Some(format!("removed initializer `{} = {}`", d.name, print_expr(&e)));
                        }
                        *k += 1;
                    }
                }
            }
            Stmt::For { init, step, .. } => {
                for clause in 0..2 {
                    let present = if clause == 0 { init.is_some() } else { step.is_some() };
                    if !present {
                        continue;
                    }
                    if *k == target {
                        let Stmt::For {
                            mut init,
                            cond,
                            mut step,
                            body,
                        } = b.stmts.remove(i)
                        else {
                            unreachable!()
                        };
                        let removed = if clause == 0 { init.take() } else { step.take() }.unwrap();
                        let what = if clause == 0 { "loop init" } else { "loop step" };
                        if for_is_convertible(&step, &body) {
                            for (j, s) in for_to_while_stmts(init, cond, step, body).into_iter().enumerate() {
                                b.stmts.insert(i + j, s);
                            }
                        } else {
                            b.stmts.insert(i, Stmt::For { init, cond, step, body });
                        }
                        return Some(format!("removed {what} `{}`", print_expr(&removed)));
                    }
                    *k += 1;
                }
            }
            _ => {}
        }
        let found = match &mut b.stmts[i] {
            Stmt::If {
                then_block,
                else_block,
                ..
            } => me_walk(then_block, target, k).or_else(|| else_block.as_mut().and_then(|e| me_walk(e, target, k))),
            Stmt::While { body, .. } | Stmt::For { body, .. } | Stmt::Block(body) => me_walk(body, target, k),
            _ => None,
        };
        if found.is_some() {
            return found;
        }
        i += 1;
    }
    None
}

fn candidates(program: &Program, bug: BugType, rng: &mut impl Rng) -> Vec<Injection> {
    match bug {
        BugType::Wco => wco_candidates(program, rng),
        BugType::Vm => vm_candidates(program, rng),
        BugType::Me => me_candidates(program),
    }
}

/// All candidates of one bug type that fail at least one test.
pub fn inject(program: &Program, bug: BugType, suite: &TestSuite, seed: u64) -> Vec<Injection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates(program, bug, &mut rng)
        .into_iter()
        .filter(|c| fails_some_test(&c.program, suite, DEFAULT_STEP_LIMIT))
        .collect()
}

pub fn inject_wco(program: &Program, suite: &TestSuite, seed: u64) -> Vec<Injection> {
    inject(program, BugType::Wco, suite, seed)
}

pub fn inject_vm(program: &Program, suite: &TestSuite, seed: u64) -> Vec<Injection> {
    inject(program, BugType::Vm, suite, seed)
}

pub fn inject_me(program: &Program, suite: &TestSuite, seed: u64) -> Vec<Injection> {
    inject(program, BugType::Me, suite, seed)
}

/// A random failing candidate, trying them in shuffled order and stopping
/// at the first one that fails a test.
pub fn sample_failing(program: &Program, bug: BugType, suite: &TestSuite, step_limit: u64, rng: &mut impl Rng) -> Option<Injection> {
    let mut cands = candidates(program, bug, rng);
    cands.shuffle(rng);
    cands.into_iter().find(|c| fails_some_test(&c.program, suite, step_limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, pretty_print, TestCase};

    const COUNT_LOOP: &str = "int main(){ int n, i; scanf(\"%d\", &n); for(i = 1; i <= n; i++){ printf(\"%d\\n\", i); } return 0; }";

    fn suite() -> TestSuite {
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

    #[test]
    fn wco_sites_fail_the_suite() {
        let p = parse(COUNT_LOOP).unwrap();
        let all = inject_wco(&p, &suite(), 1);
        assert_eq!(all.len(), 1);
        assert!(all[0].description.starts_with("`i <= n` -> "));
        let none = parse("int main(){ int a; a = 1; printf(\"%d\", a); return 0; }").unwrap();
        assert!(inject_wco(&none, &suite(), 1).is_empty());
    }

    #[test]
    fn vm_replaces_a_read() {
        let p = parse(COUNT_LOOP).unwrap();
        let all = inject_vm(&p, &suite(), 2);
        assert!(!all.is_empty());
        for c in &all {
            assert_eq!(c.program.var_keys(), p.var_keys());
        }
        let single = parse("int main(){ int a; scanf(\"%d\", &a); printf(\"%d\", a); return 0; }").unwrap();
        assert!(vm_candidates(&single, &mut ChaCha8Rng::seed_from_u64(0)).is_empty());
    }

    #[test]
    fn me_removes_loop_clauses_via_while() {
        let p = parse(COUNT_LOOP).unwrap();
        let all = me_candidates(&p);
        assert_eq!(all.len(), 2);
        let init = pretty_print(&all[0].program);
        assert!(init.contains("while (i <= n)") && !init.contains("i = 1"), "{init}");
        let step = pretty_print(&all[1].program);
        assert!(step.contains("i = 1;") && !step.contains("i++"), "{step}");
        // both fail: one reads an uninitialised counter, one never terminates
        assert_eq!(inject_me(&p, &suite(), 0).len(), 2);
        let empty = parse("int main(){ return 0; }").unwrap();
        assert!(me_candidates(&empty).is_empty());
    }

    #[test]
    fn sampling_is_seeded() {
        let p = parse(COUNT_LOOP).unwrap();
        let a = sample_failing(&p, BugType::Vm, &suite(), DEFAULT_STEP_LIMIT, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_failing(&p, BugType::Vm, &suite(), DEFAULT_STEP_LIMIT, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert!(a.is_some());
    }
}
