use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lang::ast::*;
use crate::lang::visit::{for_each_expr_mut, for_each_stmt_mut};

/// The five semantics-preserving rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    MirrorComparisons,
    SwapIfElse,
    MirrorIncDec,
    ReorderDecls,
    ForToWhile,
}

impl Family {
    /// Bit order used by configuration ids.
    pub const ALL: [Family; 5] = [
        Family::MirrorComparisons,
        Family::SwapIfElse,
        Family::MirrorIncDec,
        Family::ReorderDecls,
        Family::ForToWhile,
    ];

    /// Order in which a configuration applies its families.
    pub const CANONICAL_ORDER: [Family; 5] = [
        Family::ReorderDecls,
        Family::MirrorIncDec,
        Family::MirrorComparisons,
        Family::SwapIfElse,
        Family::ForToWhile,
    ];

    pub fn bit(self) -> u8 {
        1 << Family::ALL.iter().position(|&f| f == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::MirrorComparisons => "mirror-comparisons",
            Family::SwapIfElse => "swap-if-else",
            Family::MirrorIncDec => "mirror-incdec",
            Family::ReorderDecls => "reorder-decls",
            Family::ForToWhile => "for-to-while",
        }
    }
}

/// Side-effect free, so evaluation order of the two operands is irrelevant.
fn is_pure(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Float(_) | Expr::Var(_) => true,
        Expr::Unary { expr, .. } | Expr::Cast { expr, .. } => is_pure(expr),
        Expr::Binary { lhs, rhs, .. } => is_pure(lhs) && is_pure(rhs),
        Expr::IncDec { .. } | Expr::Assign { .. } | Expr::Call { .. } => false,
    }
}

/// `l OP r` becomes `r OP' l` with the mirrored operator.
pub fn mirror_comparison(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Binary { op, lhs, rhs } if op.is_comparison() => Some(Expr::Binary {
            op: op.mirrored()?,
            lhs: rhs.clone(),
            rhs: lhs.clone(),
        }),
        _ => None,
    }
}

fn is_constant(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Float(_) => true,
        Expr::Unary { op: UnaryOp::Neg, expr } => is_constant(expr),
        _ => false,
    }
}

fn contains_continue(b: &Block) -> bool {
    b.stmts.iter().any(|s| match s {
        Stmt::Continue => true,
        Stmt::If {
            then_block,
            else_block,
            ..
        } => contains_continue(then_block) || else_block.as_ref().is_some_and(contains_continue),
        Stmt::While { body, .. } | Stmt::For { body, .. } | Stmt::Block(body) => contains_continue(body),
        _ => false,
    })
}

fn expr_names(e: &Expr, out: &mut Vec<String>) {
    let mut e = e.clone();
    crate::lang::visit::expr_refs(&mut e, &mut |r, _| out.push(r.name.clone()));
}

/// Whether a `for` loop can become `init; while (cond) { body; step; }`.
/// Bodies with `continue` would skip the step, and a body-level
/// declaration could capture a name the step uses.
pub fn for_is_convertible(step: &Option<Expr>, body: &Block) -> bool {
    if contains_continue(body) {
        return false;
    }
    let Some(step) = step else { return true };
    let mut used = Vec::new();
    expr_names(step, &mut used);
    !body.stmts.iter().any(|s| match s {
        Stmt::Decl { vars, .. } => vars.iter().any(|d| used.contains(&d.name)),
        _ => false,
    })
}

/// Expands a convertible `for` into the statements replacing it.
pub fn for_to_while_stmts(init: Option<Expr>, cond: Option<Expr>, step: Option<Expr>, mut body: Block) -> Vec<Stmt> {
    let mut out = Vec::new();
    if let Some(i) = init {
        out.push(Stmt::Expr(i));
    }
    if let Some(s) = step {
        body.stmts.push(Stmt::Expr(s));
    }
    out.push(Stmt::While {
        cond: cond.unwrap_or(Expr::Int(1)),
        body,
    });
    out
}

/// Rewrites the sites of one family. Sites are numbered in a fixed walk
/// order and rewritten when `select(site)` holds. Returns the new program
/// (unresolved) and the number of sites seen.
pub(crate) fn rewrite(
    program: &Program,
    family: Family,
    select: &dyn Fn(usize) -> bool,
    rng: &mut impl Rng,
) -> (Program, usize) {
    let mut p = program.clone();
    let mut site = 0;
    match family {
        Family::MirrorComparisons => for_each_expr_mut(&mut p, &mut |e| {
            if let Expr::Binary { op, lhs, rhs } = e {
                if op.is_comparison() && is_pure(lhs) && is_pure(rhs) {
                    if select(site) {
                        *e = mirror_comparison(e).unwrap();
                    }
                    site += 1;
                }
            }
        }),
        Family::SwapIfElse => for_each_stmt_mut(&mut p, &mut |s| {
            if let Stmt::If {
                cond,
                then_block,
                else_block: Some(else_block),
            } = s
            {
                if select(site) {
                    *cond = Expr::not(cond.clone());
                    std::mem::swap(then_block, else_block);
                }
                site += 1;
            }
        }),
        Family::MirrorIncDec => for_each_stmt_mut(&mut p, &mut |s| {
            let target = match s {
                Stmt::Expr(e @ Expr::IncDec { .. }) => Some(e),
                Stmt::For {
                    step: Some(e @ Expr::IncDec { .. }),
                    ..
                } => Some(e),
                _ => None,
            };
            if let Some(Expr::IncDec { op, .. }) = target {
                if select(site) {
                    *op = op.mirrored();
                }
                site += 1;
            }
        }),
        Family::ReorderDecls => for_each_stmt_mut(&mut p, &mut |s| {
            if let Stmt::Decl { vars, .. } = s {
                if vars.len() >= 2 && vars.iter().all(|d| d.init.as_ref().is_none_or(is_constant)) {
                    if select(site) {
                        let before: Vec<String> = vars.iter().map(|d| d.name.clone()).collect();
                        loop {
                            vars.shuffle(rng);
                            if vars.iter().map(|d| &d.name).ne(before.iter()) {
                                break;
                            }
                        }
                    }
                    site += 1;
                }
            }
        }),
        Family::ForToWhile => {
            for f in &mut p.functions {
                convert_fors(&mut f.body, &mut site, select);
            }
        }
    }
    (p, site)
}

fn convert_fors(b: &mut Block, site: &mut usize, select: &dyn Fn(usize) -> bool) {
    let stmts = std::mem::take(&mut b.stmts);
    for mut s in stmts {
        match &mut s {
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                convert_fors(then_block, site, select);
                if let Some(e) = else_block {
                    convert_fors(e, site, select);
                }
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } | Stmt::Block(body) => convert_fors(body, site, select),
            _ => {}
        }
        if let Stmt::For { step, body, .. } = &s {
            if for_is_convertible(step, body) {
                let chosen = select(*site);
                *site += 1;
                if chosen {
                    let Stmt::For { init, cond, step, body } = s else { unreachable!() };
                    b.stmts.extend(for_to_while_stmts(init, cond, step, body));
                    continue;
                }
            }
        }
        b.stmts.push(s);
    }
}

/// Number of rewrite sites of `family` in `program`.
pub fn count_sites(program: &Program, family: Family) -> usize {
    rewrite(program, family, &|_| false, &mut fixed_rng()).1
}

/// Families other than reorder-decls never draw from the generator.
fn fixed_rng() -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(0)
}

fn apply_all(program: &Program, family: Family, rng: &mut impl Rng) -> Option<Program> {
    let (p, sites) = rewrite(program, family, &|_| true, rng);
    if sites == 0 {
        return None;
    }
    Some(p.resolved().expect("rewrites keep programs well scoped"))
}

/// Mirrors every side-effect-free comparison. `None` when there is none.
pub fn mirror_comparisons(program: &Program) -> Option<Program> {
    apply_all(program, Family::MirrorComparisons, &mut fixed_rng())
}

/// Negates the condition and swaps the branches of every `if` with an else.
pub fn swap_if_else(program: &Program) -> Option<Program> {
    apply_all(program, Family::SwapIfElse, &mut fixed_rng())
}

/// Swaps prefix and postfix forms of every statement-level `++`/`--`.
pub fn mirror_incdec(program: &Program) -> Option<Program> {
    apply_all(program, Family::MirrorIncDec, &mut fixed_rng())
}

/// Permutes the declarators of every multi-variable declaration.
pub fn reorder_decls(program: &Program, rng: &mut impl Rng) -> Option<Program> {
    apply_all(program, Family::ReorderDecls, rng)
}

/// Rewrites every convertible `for` loop as a `while` loop.
pub fn for_to_while(program: &Program) -> Option<Program> {
    apply_all(program, Family::ForToWhile, &mut fixed_rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, parse_expr, pretty_print, print_expr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mirrors_a_loop_bound() {
        let e = parse_expr("i <= n").unwrap();
        assert_eq!(print_expr(&mirror_comparison(&e).unwrap()), "n >= i");
        let e = parse_expr("a == b").unwrap();
        assert_eq!(print_expr(&mirror_comparison(&e).unwrap()), "b == a");
    }

    #[test]
    fn impure_comparisons_are_left_alone() {
        let p = parse("int f(){ return 1; } int main(){ int a; a = 0; if (f() < a) { a = 1; } return 0; }").unwrap();
        assert!(mirror_comparisons(&p).is_none());
    }

    #[test]
    fn for_becomes_while() {
        let p = parse("int main(){ int n, i; scanf(\"%d\", &n); for (i = 1; i <= n; i++) { printf(\"%d\\n\", i); } return 0; }").unwrap();
        let w = for_to_while(&p).unwrap();
        let text = pretty_print(&w);
        assert!(text.contains("i = 1;\n    while (i <= n) {\n        printf(\"%d\\n\", i);\n        i++;\n    }"), "{text}");
    }

    #[test]
    fn loops_with_continue_are_not_converted() {
        let p = parse("int main(){ int i; for (i = 0; i < 3; i++) { if (i == 1) { continue; } } return 0; }").unwrap();
        assert!(for_to_while(&p).is_none());
        assert_eq!(count_sites(&p, Family::ForToWhile), 0);
    }

    #[test]
    fn shadowing_body_declaration_blocks_conversion() {
        let p = parse("int main(){ int i; for (i = 0; i < 3; i++) { int i; i = 5; } return 0; }").unwrap();
        assert!(for_to_while(&p).is_none());
    }

    #[test]
    fn swap_negates_condition() {
        let p = parse("int main(){ int c; c = 1; if (c > 0) { c = 2; } else { c = 3; } return 0; }").unwrap();
        let s = pretty_print(&swap_if_else(&p).unwrap());
        assert!(s.contains("if (!(c > 0)) {\n        c = 3;\n    } else {\n        c = 2;\n    }"), "{s}");
        let no_else = parse("int main(){ int c; c = 1; if (c) { c = 2; } return 0; }").unwrap();
        assert!(swap_if_else(&no_else).is_none());
    }

    #[test]
    fn incdec_only_at_statement_level() {
        let p = parse("int main(){ int i, j; i = 0; i++; j = i++; for (j = 0; j < 2; ++j) { } return 0; }").unwrap();
        let s = pretty_print(&mirror_incdec(&p).unwrap());
        assert!(s.contains("    ++i;"));
        assert!(s.contains("j = i++;"));
        assert!(s.contains("j++)"));
    }

    #[test]
    fn reorder_changes_declaration_order() {
        let p = parse("int main(){ int a, b, c; a = 1; b = 2; c = a + b; printf(\"%d\", c); return 0; }").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = reorder_decls(&p, &mut rng).unwrap();
        assert_ne!(r.var_keys(), p.var_keys());
        let mut sorted = r.var_keys();
        sorted.sort();
        assert_eq!(sorted, p.var_keys());
    }
}
