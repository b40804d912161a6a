use std::collections::BTreeMap;

use crate::lang::ast::*;
use crate::lang::visit::{for_each_block_mut, for_each_expr_mut, for_each_var_ref_mut, var_refs, Role};
use crate::lang::{print_expr, rename_variables, Direction, LangError, Renaming};
use crate::mutate::{mirror_comparison, BugType};

/// `l OP r` as `r OP' l`. Applying it twice gives back the input.
pub fn mirrored_expression(cmp: &Expr) -> Option<Expr> {
    mirror_comparison(cmp)
}

/// Comparison key with the sides in a canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CmpKey {
    pub op: BinOp,
    pub left: String,
    pub right: String,
}

impl CmpKey {
    /// Normalizes `l OP r` so the printed left side is not greater than the
    /// right one. The flag says whether the sides were swapped.
    pub fn of(op: BinOp, lhs: &Expr, rhs: &Expr) -> (CmpKey, bool) {
        let (l, r) = (print_expr(lhs), print_expr(rhs));
        if l > r {
            let op = op.mirrored().expect("comparison operators mirror");
            (CmpKey { op, left: r, right: l }, true)
        } else {
            (CmpKey { op, left: l, right: r }, false)
        }
    }

    pub fn sides(&self) -> (&str, &str) {
        (&self.left, &self.right)
    }
}

/// How often each normalized comparison occurs in a program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmpMultiset {
    counts: BTreeMap<CmpKey, usize>,
}

impl CmpMultiset {
    pub fn of(program: &Program) -> Self {
        let mut counts = BTreeMap::new();
        for (key, _) in comparison_sites(program) {
            *counts.entry(key).or_insert(0) += 1;
        }
        CmpMultiset { counts }
    }

    pub fn count(&self, key: &CmpKey) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CmpKey, usize)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Operators used on the given pair of sides.
    fn ops_for(&self, left: &str, right: &str) -> Vec<BinOp> {
        self.counts
            .keys()
            .filter(|k| k.left == left && k.right == right)
            .map(|k| k.op)
            .collect()
    }
}

/// Comparisons in walk order with their key and orientation.
fn comparison_sites(program: &Program) -> Vec<(CmpKey, bool)> {
    let mut out = Vec::new();
    let mut copy = program.clone();
    for_each_expr_mut(&mut copy, &mut |e| {
        if let Expr::Binary { op, lhs, rhs } = e {
            if op.is_comparison() {
                out.push(CmpKey::of(*op, lhs, rhs));
            }
        }
    });
    out
}

/// A repair attempt for one mapping, already expressed in the buggy
/// program's own variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairCandidate {
    pub bug_type: BugType,
    pub description: String,
    pub program: Program,
}

#[derive(Debug, Clone)]
enum Edit {
    SetOp { site: usize, op: BinOp },
    Replace { occurrence: usize, name: String },
    Insert { block: usize, pos: usize, snippet: Expr },
}

/// The buggy program renamed into the correct program's vocabulary.
#[derive(Debug, Clone)]
pub struct MappedPair {
    renamed: Program,
    renaming: Renaming,
    correct: Program,
}

impl MappedPair {
    /// `mapping` goes from buggy variable keys to correct variable keys.
    pub fn new(buggy: &Program, correct: &Program, mapping: &BTreeMap<String, String>) -> Result<Self, LangError> {
        let correct_keys = correct.var_keys();
        let targets = buggy
            .var_keys()
            .iter()
            .map(|k| {
                let target = mapping
                    .get(k)
                    .ok_or_else(|| LangError::IncompleteMapping(format!("no target for `{k}`")))?;
                let col = correct_keys
                    .iter()
                    .position(|c| c == target)
                    .ok_or_else(|| LangError::IncompleteMapping(format!("`{target}` is not a correct-side variable")))?;
                Ok(correct.vars[col].name.clone())
            })
            .collect::<Result<Vec<_>, LangError>>()?;
        let renaming = Renaming::new(buggy, &targets)?;
        let renamed = rename_variables(buggy, &renaming, Direction::Forward)?;
        Ok(MappedPair {
            renamed,
            renaming,
            correct: correct.clone(),
        })
    }

    pub fn renamed(&self) -> &Program {
        &self.renamed
    }

    /// Operator replacements at buggy comparisons whose operator is in
    /// surplus, toward an operator the correct program uses more often on
    /// the same sides.
    pub fn wco(&self) -> Candidates<'_> {
        let buggy = CmpMultiset::of(&self.renamed);
        let correct = CmpMultiset::of(&self.correct);
        let mut edits = Vec::new();
        for (site, (key, swapped)) in comparison_sites(&self.renamed).into_iter().enumerate() {
            if buggy.count(&key) <= correct.count(&key) {
                continue;
            }
            for op in correct.ops_for(&key.left, &key.right) {
                let want = CmpKey { op, ..key.clone() };
                if op == key.op || correct.count(&want) <= buggy.count(&want) {
                    continue;
                }
                let op = if swapped { op.mirrored().unwrap() } else { op };
                edits.push(Edit::SetOp { site, op });
            }
        }
        self.candidates(BugType::Wco, edits)
    }

    /// Single-occurrence replacements of a variable used more often than in
    /// the correct program by one used less often.
    pub fn vm(&self) -> Candidates<'_> {
        let buggy = name_counts(&self.renamed);
        let correct = name_counts(&self.correct);
        let over: Vec<&String> = buggy.keys().filter(|n| buggy[*n] > correct.get(*n).copied().unwrap_or(0)).collect();
        let under: Vec<&String> = correct.keys().filter(|n| correct[*n] > buggy.get(*n).copied().unwrap_or(0)).collect();
        let refs = var_refs(&self.renamed);
        let mut edits = Vec::new();
        for x in &over {
            for y in &under {
                for (occurrence, (r, role)) in refs.iter().enumerate() {
                    if *role == Role::Read && &&r.name == x {
                        edits.push(Edit::Replace {
                            occurrence,
                            name: (*y).clone(),
                        });
                    }
                }
            }
        }
        self.candidates(BugType::Vm, edits)
    }

    /// Insertions of expressions the correct program has more of, at every
    /// position of every block.
    pub fn me(&self) -> Candidates<'_> {
        let buggy = snippets(&self.renamed);
        let correct = snippets(&self.correct);
        let mut have: BTreeMap<String, usize> = BTreeMap::new();
        for (text, _) in &buggy {
            *have.entry(text.clone()).or_insert(0) += 1;
        }
        let mut need: BTreeMap<String, usize> = BTreeMap::new();
        for (text, _) in &correct {
            *need.entry(text.clone()).or_insert(0) += 1;
        }
        let mut chosen: Vec<Expr> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (text, e) in correct {
            if need[&text] > have.get(&text).copied().unwrap_or(0) && seen.insert(text) {
                chosen.push(e);
            }
        }
        let mut sizes = Vec::new();
        let mut copy = self.renamed.clone();
        for_each_block_mut(&mut copy, &mut |b| sizes.push(b.stmts.len()));
        let mut edits = Vec::new();
        for snippet in chosen {
            for (block, &len) in sizes.iter().enumerate() {
                for pos in 0..=len {
                    edits.push(Edit::Insert {
                        block,
                        pos,
                        snippet: snippet.clone(),
                    });
                }
            }
        }
        self.candidates(BugType::Me, edits)
    }

    /// All three generators in repair order.
    pub fn all(&self) -> impl Iterator<Item = RepairCandidate> + '_ {
        self.wco().chain(self.vm()).chain(self.me())
    }

    fn candidates(&self, bug_type: BugType, edits: Vec<Edit>) -> Candidates<'_> {
        Candidates {
            pair: self,
            bug_type,
            edits: edits.into_iter(),
        }
    }

    fn apply(&self, edit: &Edit) -> Option<(Program, String)> {
        let mut p = self.renamed.clone();
        let description = match edit {
            Edit::SetOp { site, op } => {
                let mut k = 0;
                let mut text = String::new();
                for_each_expr_mut(&mut p, &mut |e| {
                    if let Expr::Binary { op: cur, .. } = e {
                        if cur.is_comparison() {
                            if k == *site {
                                let before = print_expr(e);
                                if let Expr::Binary { op: cur, .. } = e {
                                    *cur = *op;
                                }
                                text = format!("`{before}` -> `{}`", print_expr(e));
                            }
                            k += 1;
                        }
                    }
                });
                text
            }
            Edit::Replace { occurrence, name } => {
                let mut k = 0;
                let mut text = String::new();
                for_each_var_ref_mut(&mut p, &mut |r, _| {
                    if k == *occurrence {
                        text = format!("occurrence #{k} of `{}` -> `{name}`", r.name);
                        r.name = name.clone();
                    }
                    k += 1;
                });
                text
            }
            Edit::Insert { block, pos, snippet } => {
                let mut k = 0;
                for_each_block_mut(&mut p, &mut |b| {
                    if k == *block {
                        b.stmts.insert(*pos, Stmt::Expr(snippet.clone()));
                    }
                    k += 1;
                });
                format!("inserted `{};` at block {block}, position {pos}", print_expr(snippet))
            }
        };
        let p = p.resolved().ok()?;
        let back = rename_variables(&p, &self.renaming, Direction::Reverse).ok()?;
        // the reverse names must bind exactly as the mapped names did
        let before: Vec<DeclId> = var_refs(&p).into_iter().map(|(r, _)| r.decl).collect();
        let after: Vec<DeclId> = var_refs(&back).into_iter().map(|(r, _)| r.decl).collect();
        if before != after {
            return None;
        }
        Some((back, description))
    }
}

/// Lazily built candidates of one bug class.
pub struct Candidates<'a> {
    pair: &'a MappedPair,
    bug_type: BugType,
    edits: std::vec::IntoIter<Edit>,
}

impl Iterator for Candidates<'_> {
    type Item = RepairCandidate;

    fn next(&mut self) -> Option<RepairCandidate> {
        for edit in self.edits.by_ref() {
            if let Some((program, description)) = self.pair.apply(&edit) {
                return Some(RepairCandidate {
                    bug_type: self.bug_type,
                    description,
                    program,
                });
            }
        }
        None
    }
}

fn name_counts(p: &Program) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for (r, _) in var_refs(p) {
        *out.entry(r.name).or_insert(0) += 1;
    }
    out
}

/// Expression statements, declaration initializers (as assignments) and
/// `for` clauses, with their printed form, in text order.
fn snippets(p: &Program) -> Vec<(String, Expr)> {
    fn walk(b: &Block, out: &mut Vec<(String, Expr)>) {
        for s in &b.stmts {
            match s {
                Stmt::Expr(e) => out.push((print_expr(e), strip(e))),
                Stmt::Decl { vars, .. } => {
                    for d in vars {
                        if let Some(init) = &d.init {
                            let e = Expr::Assign {
                                op: AssignOp::Set,
                                target: VarRef::new(d.name.clone()),
                                value: Box::new(strip(init)),
                            };
                            out.push((print_expr(&e), e));
                        }
                    }
                }
                Stmt::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    walk(then_block, out);
                    if let Some(e) = else_block {
                        walk(e, out);
                    }
                }
                Stmt::While { body, .. } | Stmt::Block(body) => walk(body, out),
                Stmt::For { init, step, body, .. } => {
                    if let Some(e) = init {
                        out.push((print_expr(e), strip(e)));
                    }
                    walk(body, out);
                    if let Some(e) = step {
                        out.push((print_expr(e), strip(e)));
                    }
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    for f in &p.functions {
        walk(&f.body, &mut out);
    }
    out
}

/// Copy with variable bindings cleared so it can be resolved elsewhere.
fn strip(e: &Expr) -> Expr {
    let mut e = e.clone();
    crate::lang::visit::expr_refs(&mut e, &mut |r, _| r.decl = UNRESOLVED);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, parse_expr, pretty_print};

    fn identity(p: &Program) -> BTreeMap<String, String> {
        p.var_keys().into_iter().map(|k| (k.clone(), k)).collect()
    }

    #[test]
    fn mirror_is_an_involution() {
        let e = parse_expr("i <= n").unwrap();
        let m = mirrored_expression(&e).unwrap();
        assert_eq!(print_expr(&m), "n >= i");
        assert_eq!(mirrored_expression(&m).unwrap(), e);
        assert_eq!(print_expr(&mirrored_expression(&parse_expr("a == b").unwrap()).unwrap()), "b == a");
        assert!(mirrored_expression(&parse_expr("a + b").unwrap()).is_none());
    }

    #[test]
    fn multiset_folds_mirrors() {
        let a = parse("int main(){ int i, n; if (i <= n) { i = 1; } if (n >= i) { i = 2; } return 0; }").unwrap();
        let m = CmpMultiset::of(&a);
        assert_eq!(m.len(), 2);
        assert_eq!(m.iter().count(), 1);
    }

    #[test]
    fn wco_uses_the_mirrored_correct_operator() {
        let buggy = parse("int main(){ int i, n; scanf(\"%d\", &n); i = 1; while (i < n) { printf(\"%d\\n\", i); i++; } return 0; }").unwrap();
        let correct = parse("int main(){ int i, n; scanf(\"%d\", &n); i = 1; while (n >= i) { printf(\"%d\\n\", i); i++; } return 0; }").unwrap();
        let pair = MappedPair::new(&buggy, &correct, &identity(&buggy)).unwrap();
        let got: Vec<_> = pair.wco().collect();
        assert_eq!(got.len(), 1);
        assert!(pretty_print(&got[0].program).contains("while (i <= n)"));
        let same = MappedPair::new(&correct, &correct, &identity(&correct)).unwrap();
        assert_eq!(same.all().count(), 0);
    }

    #[test]
    fn vm_swaps_one_read() {
        let correct = parse("int main(){ int a, b; scanf(\"%d %d\", &a, &b); printf(\"%d\", a - b); return 0; }").unwrap();
        let buggy = parse("int main(){ int a, b; scanf(\"%d %d\", &a, &b); printf(\"%d\", a - a); return 0; }").unwrap();
        let pair = MappedPair::new(&buggy, &correct, &identity(&buggy)).unwrap();
        let got: Vec<String> = pair.vm().map(|c| pretty_print(&c.program)).collect();
        assert_eq!(got.len(), 2);
        assert!(got.iter().any(|s| s.contains("a - b")));
        assert!(got.iter().any(|s| s.contains("b - a")));
    }

    #[test]
    fn me_candidates_are_renamed_back_and_scope_checked() {
        let correct = parse(
            "int main(){ int n, i; scanf(\"%d\", &n); for (i = 1; i <= n; i++) { printf(\"%d\\n\", i); } return 0; }",
        )
        .unwrap();
        let buggy = parse(
            "void loop(int j, int l){ while (l >= j) { printf(\"%d\\n\", j); ++j; } } int main(){ int j, l; scanf(\"%d\", &l); loop(j, l); return 0; }",
        )
        .unwrap();
        let mut mapping = BTreeMap::new();
        for (k, v) in [("loop::j", "i"), ("loop::l", "n"), ("main::j", "i"), ("main::l", "n")] {
            mapping.insert(k.to_string(), v.to_string());
        }
        let pair = MappedPair::new(&buggy, &correct, &mapping).unwrap();
        let all: Vec<_> = pair.me().collect();
        assert!(!all.is_empty());
        for c in &all {
            assert!(var_refs(&c.program).iter().all(|(r, _)| r.name == "j" || r.name == "l"));
            assert!(c.program.vars.iter().all(|v| v.name == "j" || v.name == "l"));
        }
        assert!(pretty_print(&all[0].program).contains("j = 1;"));
    }
}
