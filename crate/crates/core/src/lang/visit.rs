//! Traversal helpers shared by the graph builder, the mutator and the
//! repair passes. All walks follow source text order.

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Read,
    Write,
}

/// Visits every variable occurrence in text order with its access role.
pub fn for_each_var_ref_mut(program: &mut Program, f: &mut impl FnMut(&mut VarRef, Role)) {
    for func in &mut program.functions {
        block_refs(&mut func.body, f);
    }
}

pub fn var_refs(program: &Program) -> Vec<(VarRef, Role)> {
    let mut out = Vec::new();
    let mut copy = program.clone();
    for_each_var_ref_mut(&mut copy, &mut |r, role| out.push((r.clone(), role)));
    out
}

fn block_refs(b: &mut Block, f: &mut impl FnMut(&mut VarRef, Role)) {
    for s in &mut b.stmts {
        stmt_refs(s, f);
    }
}

pub fn stmt_refs(s: &mut Stmt, f: &mut impl FnMut(&mut VarRef, Role)) {
    match s {
        Stmt::Decl { vars, .. } => {
            for d in vars {
                if let Some(e) = &mut d.init {
                    expr_refs(e, f);
                }
            }
        }
        Stmt::Expr(e) => expr_refs(e, f),
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => {
            expr_refs(cond, f);
            block_refs(then_block, f);
            if let Some(b) = else_block {
                block_refs(b, f);
            }
        }
        Stmt::While { cond, body } => {
            expr_refs(cond, f);
            block_refs(body, f);
        }
        Stmt::For { init, cond, step, body } => {
            for e in [init, cond, step].into_iter().flatten() {
                expr_refs(e, f);
            }
            block_refs(body, f);
        }
        Stmt::Return(Some(e)) => expr_refs(e, f),
        Stmt::Return(None) | Stmt::Break | Stmt::Continue => {}
        Stmt::Printf { args, .. } => {
            for a in args {
                expr_refs(a, f);
            }
        }
        Stmt::Scanf { args, .. } => {
            for a in args {
                f(a, Role::Write);
            }
        }
        Stmt::Block(b) => block_refs(b, f),
    }
}

pub fn expr_refs(e: &mut Expr, f: &mut impl FnMut(&mut VarRef, Role)) {
    match e {
        Expr::Int(_) | Expr::Float(_) => {}
        Expr::Var(r) => f(r, Role::Read),
        Expr::Unary { expr, .. } | Expr::Cast { expr, .. } => expr_refs(expr, f),
        Expr::IncDec { target, .. } => f(target, Role::Write),
        Expr::Binary { lhs, rhs, .. } => {
            expr_refs(lhs, f);
            expr_refs(rhs, f);
        }
        Expr::Assign { target, value, .. } => {
            f(target, Role::Write);
            expr_refs(value, f);
        }
        Expr::Call { args, .. } => {
            for a in args {
                expr_refs(a, f);
            }
        }
    }
}

/// Visits every block (function bodies and all nested blocks) in pre-order.
pub fn for_each_block_mut(program: &mut Program, f: &mut impl FnMut(&mut Block)) {
    for func in &mut program.functions {
        block_walk(&mut func.body, f);
    }
}

fn block_walk(b: &mut Block, f: &mut impl FnMut(&mut Block)) {
    f(b);
    for s in &mut b.stmts {
        match s {
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                block_walk(then_block, f);
                if let Some(e) = else_block {
                    block_walk(e, f);
                }
            }
            Stmt::While { body, .. } | Stmt::For { body, .. } => block_walk(body, f),
            Stmt::Block(inner) => block_walk(inner, f),
            _ => {}
        }
    }
}

/// Number of blocks visited by [`for_each_block_mut`].
pub fn count_blocks(program: &Program) -> usize {
    let mut copy = program.clone();
    let mut n = 0;
    for_each_block_mut(&mut copy, &mut |_| n += 1);
    n
}

/// Visits every statement in pre-order (a statement before the statements
/// nested in it).
pub fn for_each_stmt_mut(program: &mut Program, f: &mut impl FnMut(&mut Stmt)) {
    for_each_block_mut(program, &mut |b: &mut Block| {
        for s in &mut b.stmts {
            f(s);
        }
    });
}

/// Visits every expression node, parents before children, in text order.
pub fn for_each_expr_mut(program: &mut Program, f: &mut impl FnMut(&mut Expr)) {
    for func in &mut program.functions {
        block_exprs(&mut func.body, f);
    }
}

fn block_exprs(b: &mut Block, f: &mut impl FnMut(&mut Expr)) {
    for s in &mut b.stmts {
        match s {
            Stmt::Decl { vars, .. } => {
                for d in vars {
                    if let Some(e) = &mut d.init {
                        expr_walk(e, f);
                    }
                }
            }
            Stmt::Expr(e) => expr_walk(e, f),
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                expr_walk(cond, f);
                block_exprs(then_block, f);
                if let Some(b) = else_block {
                    block_exprs(b, f);
                }
            }
            Stmt::While { cond, body } => {
                expr_walk(cond, f);
                block_exprs(body, f);
            }
            Stmt::For { init, cond, step, body } => {
                for e in [init, cond, step].into_iter().flatten() {
                    expr_walk(e, f);
                }
                block_exprs(body, f);
            }
            Stmt::Return(Some(e)) => expr_walk(e, f),
            Stmt::Printf { args, .. } => {
                for a in args {
                    expr_walk(a, f);
                }
            }
            Stmt::Block(b) => block_exprs(b, f),
            Stmt::Return(None) | Stmt::Break | Stmt::Continue | Stmt::Scanf { .. } => {}
        }
    }
}

fn expr_walk(e: &mut Expr, f: &mut impl FnMut(&mut Expr)) {
    f(e);
    match e {
        Expr::Unary { expr, .. } | Expr::Cast { expr, .. } => expr_walk(expr, f),
        Expr::Binary { lhs, rhs, .. } => {
            expr_walk(lhs, f);
            expr_walk(rhs, f);
        }
        Expr::Assign { value, .. } => expr_walk(value, f),
        Expr::Call { args, .. } => {
            for a in args {
                expr_walk(a, f);
            }
        }
        Expr::Int(_) | Expr::Float(_) | Expr::Var(_) | Expr::IncDec { .. } => {}
    }
}

/// Sets every declaration's and occurrence's name from a per-declaration
/// table. The program must be resolved.
pub fn apply_names(program: &mut Program, names: &[String]) {
    for func in &mut program.functions {
        for p in &mut func.params {
            p.name = names[p.id].clone();
        }
    }
    for_each_stmt_mut(program, &mut |s| {
        if let Stmt::Decl { vars, .. } = s {
            for d in vars {
                d.name = names[d.id].clone();
            }
        }
    });
    for_each_var_ref_mut(program, &mut |r, _| r.name = names[r.decl].clone());
    for (v, info) in program.vars.iter_mut().enumerate() {
        info.name = names[v].clone();
    }
}
