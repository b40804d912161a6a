use crate::lang::ast::*;
use crate::lang::visit::Role;

use super::vocab::NodeTypeVocab;
use super::{Edge, EdgeSetConfig, ProgramGraph, Relation};

/// Converts a resolved program into its typed graph.
///
/// Syntax nodes come first in pre-order, followed by one variable node per
/// declaration in declaration order. Declarators with an initializer and
/// parameters contribute a written `ID` occurrence of the declared variable;
/// bare declarators do not.
pub fn build_graph(program: &Program, config: &EdgeSetConfig) -> ProgramGraph {
    let mut b = Builder::default();
    b.program(program);

    let mut edges = Vec::new();
    for &(parent, child) in &b.child_pairs {
        if config.ast {
            edges.push(edge(parent, child, Relation::ChildFwd));
            edges.push(edge(child, parent, Relation::ChildBack));
        }
    }
    if config.sibling {
        for &(a, c) in &b.sibling_pairs {
            edges.push(edge(a, c, Relation::Sibling));
        }
    }

    let first_var = b.nodes.len();
    let var_kind = NodeTypeVocab::builtin("var");
    for _ in 0..program.vars.len() {
        b.nodes.push(var_kind);
    }
    let var_node = |d: DeclId| (first_var + d) as u32;

    for &(id_node, decl, role) in &b.occurrences {
        let v = var_node(decl);
        match role {
            Role::Write if config.write => {
                edges.push(Edge { src: id_node, dst: v, rel: Relation::WriteFwd });
                edges.push(Edge { src: v, dst: id_node, rel: Relation::WriteBack });
            }
            Role::Read if config.read => {
                edges.push(Edge { src: id_node, dst: v, rel: Relation::ReadFwd });
                edges.push(Edge { src: v, dst: id_node, rel: Relation::ReadBack });
            }
            _ => {}
        }
    }
    if config.chronological {
        let mut last: Vec<Option<u32>> = vec![None; program.vars.len()];
        for &(id_node, decl, _) in &b.occurrences {
            if let Some(prev) = last[decl] {
                edges.push(Edge { src: prev, dst: id_node, rel: Relation::Chrono });
            }
            last[decl] = Some(id_node);
        }
    }

    ProgramGraph {
        nodes: b.nodes,
        edges,
        var_nodes: (0..program.vars.len()).map(var_node).collect(),
        var_names: program.var_keys(),
    }
}

fn edge(src: usize, dst: usize, rel: Relation) -> Edge {
    Edge {
        src: src as u32,
        dst: dst as u32,
        rel,
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<u16>,
    child_pairs: Vec<(usize, usize)>,
    sibling_pairs: Vec<(usize, usize)>,
    occurrences: Vec<(u32, DeclId, Role)>,
}

impl Builder {
    fn node(&mut self, kind: &str) -> usize {
        self.nodes.push(NodeTypeVocab::builtin(kind));
        self.nodes.len() - 1
    }

    fn link(&mut self, parent: usize, children: &[usize]) {
        for &c in children {
            self.child_pairs.push((parent, c));
        }
        for w in children.windows(2) {
            self.sibling_pairs.push((w[0], w[1]));
        }
    }

    fn id(&mut self, decl: DeclId, role: Role) -> usize {
        let n = self.node("ID");
        self.occurrences.push((n as u32, decl, role));
        n
    }

    fn program(&mut self, p: &Program) {
        let root = self.node("program");
        let mut children = Vec::new();
        for f in &p.functions {
            children.push(self.function(f));
        }
        self.link(root, &children);
    }

    fn function(&mut self, f: &Function) -> usize {
        let n = self.node(match f.ret {
            Type::Int => "func-int",
            Type::Float => "func-float",
            Type::Void => "func-void",
        });
        let params = self.node("params");
        let mut ps = Vec::new();
        for p in &f.params {
            let pn = self.node(if p.ty == Type::Float { "param-float" } else { "param-int" });
            let id = self.id(p.id, Role::Write);
            self.link(pn, &[id]);
            ps.push(pn);
        }
        self.link(params, &ps);
        let body = self.block(&f.body);
        self.link(n, &[params, body]);
        n
    }

    fn block(&mut self, b: &Block) -> usize {
        let n = self.node("block");
        let children: Vec<usize> = b.stmts.iter().map(|s| self.stmt(s)).collect();
        self.link(n, &children);
        n
    }

    fn opt_expr(&mut self, e: &Option<Expr>) -> usize {
        match e {
            Some(e) => self.expr(e),
            None => self.node("empty"),
        }
    }

    fn stmt(&mut self, s: &Stmt) -> usize {
        match s {
            Stmt::Decl { ty, vars } => {
                let n = self.node(if *ty == Type::Float { "decl-float" } else { "decl-int" });
                let mut ds = Vec::new();
                for d in vars {
                    let dn = self.node("declarator");
                    if let Some(init) = &d.init {
                        let id = self.id(d.id, Role::Write);
                        let v = self.expr(init);
                        self.link(dn, &[id, v]);
                    }
                    ds.push(dn);
                }
                self.link(n, &ds);
                n
            }
            Stmt::Expr(e) => self.expr(e),
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                let n = self.node("if");
                let mut c = vec![self.expr(cond), self.block(then_block)];
                if let Some(b) = else_block {
                    c.push(self.block(b));
                }
                self.link(n, &c);
                n
            }
            Stmt::While { cond, body } => {
                let n = self.node("while");
                let c = [self.expr(cond), self.block(body)];
                self.link(n, &c);
                n
            }
            Stmt::For { init, cond, step, body } => {
                let n = self.node("for");
                let c = [self.opt_expr(init), self.opt_expr(cond), self.opt_expr(step), self.block(body)];
                self.link(n, &c);
                n
            }
            Stmt::Return(e) => {
                let n = self.node("return");
                if let Some(e) = e {
                    let c = self.expr(e);
                    self.link(n, &[c]);
                }
                n
            }
            Stmt::Break => self.node("break"),
            Stmt::Continue => self.node("continue"),
            Stmt::Printf { args, .. } => {
                let n = self.node("printf");
                let mut c = vec![self.node("format-string")];
                for a in args {
                    c.push(self.expr(a));
                }
                self.link(n, &c);
                n
            }
            Stmt::Scanf { args, .. } => {
                let n = self.node("scanf");
                let mut c = vec![self.node("format-string")];
                for a in args {
                    c.push(self.id(a.decl, Role::Write));
                }
                self.link(n, &c);
                n
            }
            Stmt::Block(b) => self.block(b),
        }
    }

    fn expr(&mut self, e: &Expr) -> usize {
        match e {
            Expr::Int(_) => self.node("int-const"),
            Expr::Float(_) => self.node("float-const"),
            Expr::Var(r) => self.id(r.decl, Role::Read),
            Expr::Unary { op, expr } => {
                let n = self.node("unary");
                let o = self.node(match op {
                    UnaryOp::Neg => "neg",
                    UnaryOp::Not => "!",
                });
                let c = self.expr(expr);
                self.link(n, &[o, c]);
                n
            }
            Expr::IncDec { op, target } => {
                let n = self.node("incdec");
                let kind = match op {
                    IncDecOp::PreInc => "pre++",
                    IncDecOp::PostInc => "post++",
                    IncDecOp::PreDec => "pre--",
                    IncDecOp::PostDec => "post--",
                };
                // operand position follows the source text
                let c = if op.is_prefix() {
                    let o = self.node(kind);
                    [o, self.id(target.decl, Role::Write)]
                } else {
                    let id = self.id(target.decl, Role::Write);
                    [id, self.node(kind)]
                };
                self.link(n, &c);
                n
            }
            Expr::Binary { op, lhs, rhs } => {
                let n = self.node("expr");
                let l = self.expr(lhs);
                let o = self.node(op.symbol());
                let r = self.expr(rhs);
                self.link(n, &[l, o, r]);
                n
            }
            Expr::Assign { op, target, value } => {
                let n = self.node(match op {
                    AssignOp::Set => "assign",
                    AssignOp::Add => "assign+=",
                    AssignOp::Sub => "assign-=",
                    AssignOp::Mul => "assign*=",
                    AssignOp::Div => "assign/=",
                    AssignOp::Rem => "assign%=",
                });
                let id = self.id(target.decl, Role::Write);
                let v = self.expr(value);
                self.link(n, &[id, v]);
                n
            }
            Expr::Cast { ty, expr } => {
                let n = self.node(if *ty == Type::Float { "cast-float" } else { "cast-int" });
                let c = self.expr(expr);
                self.link(n, &[c]);
                n
            }
            Expr::Call { args, .. } => {
                let n = self.node("call");
                let c: Vec<usize> = args.iter().map(|a| self.expr(a)).collect();
                self.link(n, &c);
                n
            }
        }
    }
}
