//! Canonical pretty printer. Output always reparses to an equal tree.

use std::fmt::Write;

use super::ast::*;
use super::parser::precedence;

const INDENT: &str = "    ";

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for (i, f) in program.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let params: Vec<String> = f.params.iter().map(|p| format!("{} {}", p.ty.keyword(), p.name)).collect();
        let _ = writeln!(out, "{} {}({}) {{", f.ret.keyword(), f.name, params.join(", "));
        block_body(&mut out, &f.body, 1);
        out.push_str("}\n");
    }
    out
}

pub fn print_stmt(stmt: &Stmt) -> String {
    let mut out = String::new();
    stmt_into(&mut out, stmt, 0);
    out.trim_end().to_string()
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr_into(&mut out, e, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn block_body(out: &mut String, b: &Block, depth: usize) {
    for s in &b.stmts {
        stmt_into(out, s, depth);
    }
}

fn braced(out: &mut String, b: &Block, depth: usize) {
    out.push_str("{\n");
    block_body(out, b, depth + 1);
    indent(out, depth);
    out.push('}');
}

fn stmt_into(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match s {
        Stmt::Decl { ty, vars } => {
            out.push_str(ty.keyword());
            out.push(' ');
            for (i, d) in vars.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&d.name);
                if let Some(init) = &d.init {
                    out.push_str(" = ");
                    expr_into(out, init, 0);
                }
            }
            out.push(';');
        }
        Stmt::Expr(e) => {
            expr_into(out, e, 0);
            out.push(';');
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => {
            out.push_str("if (");
            expr_into(out, cond, 0);
            out.push_str(") ");
            braced(out, then_block, depth);
            if let Some(b) = else_block {
                out.push_str(" else ");
                braced(out, b, depth);
            }
        }
        Stmt::While { cond, body } => {
            out.push_str("while (");
            expr_into(out, cond, 0);
            out.push_str(") ");
            braced(out, body, depth);
        }
        Stmt::For { init, cond, step, body } => {
            out.push_str("for (");
            if let Some(e) = init {
                expr_into(out, e, 0);
            }
            out.push_str("; ");
            if let Some(e) = cond {
                expr_into(out, e, 0);
            }
            out.push_str("; ");
            if let Some(e) = step {
                expr_into(out, e, 0);
            }
            out.push_str(") ");
            braced(out, body, depth);
        }
        Stmt::Return(e) => {
            out.push_str("return");
            if let Some(e) = e {
                out.push(' ');
                expr_into(out, e, 0);
            }
            out.push(';');
        }
        Stmt::Break => out.push_str("break;"),
        Stmt::Continue => out.push_str("continue;"),
        Stmt::Printf { format, args } => {
            out.push_str("printf(");
            string_lit(out, format);
            for a in args {
                out.push_str(", ");
                expr_into(out, a, 0);
            }
            out.push_str(");");
        }
        Stmt::Scanf { format, args } => {
            out.push_str("scanf(");
            string_lit(out, format);
            for a in args {
                out.push_str(", &");
                out.push_str(&a.name);
            }
            out.push_str(");");
        }
        Stmt::Block(b) => braced(out, b, depth),
    }
    out.push('\n');
}

fn string_lit(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            c => out.push(c),
        }
    }
    out.push('"');
}

// Levels: 0 assignment, 1..=6 binary operators, 7 unary, 8 postfix/primary.
const UNARY: u8 = 7;
const POSTFIX: u8 = 8;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Assign { .. } => 0,
        Expr::Binary { op, .. } => precedence(*op),
        Expr::Unary { .. } | Expr::Cast { .. } => UNARY,
        Expr::IncDec { op, .. } if op.is_prefix() => UNARY,
        _ => POSTFIX,
    }
}

/// Prints `e`, parenthesized when it binds weaker than `min`.
fn expr_into(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        expr_into(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Float(v) => out.push_str(&float_literal(*v)),
        Expr::Var(r) => out.push_str(&r.name),
        Expr::Unary { op, expr } => {
            let sym = match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "!",
            };
            out.push_str(sym);
            // `- -x` and `- --x` must not glue into a decrement token
            let glue = matches!(
                (op, expr.as_ref()),
                (UnaryOp::Neg, Expr::Unary { op: UnaryOp::Neg, .. })
                    | (UnaryOp::Neg, Expr::IncDec { op: IncDecOp::PreDec, .. })
            );
            if glue {
                out.push('(');
                expr_into(out, expr, 0);
                out.push(')');
            } else {
                expr_into(out, expr, UNARY);
            }
        }
        Expr::Cast { ty, expr } => {
            let _ = write!(out, "({})", ty.keyword());
            expr_into(out, expr, UNARY);
        }
        Expr::IncDec { op, target } => match op {
            IncDecOp::PreInc => {
                let _ = write!(out, "++{}", target.name);
            }
            IncDecOp::PreDec => {
                let _ = write!(out, "--{}", target.name);
            }
            IncDecOp::PostInc => {
                let _ = write!(out, "{}++", target.name);
            }
            IncDecOp::PostDec => {
                let _ = write!(out, "{}--", target.name);
            }
        },
        Expr::Binary { op, lhs, rhs } => {
            let p = precedence(*op);
            expr_into(out, lhs, p);
            let _ = write!(out, " {} ", op.symbol());
            expr_into(out, rhs, p + 1);
        }
        Expr::Assign { op, target, value } => {
            let _ = write!(out, "{} {} ", target.name, op.symbol());
            expr_into(out, value, 0);
        }
        Expr::Call { name, args } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr_into(out, a, 0);
            }
            out.push(')');
        }
    }
}

/// Shortest decimal text that reads back as the same `f64` and is lexed
/// as a floating literal.
fn float_literal(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn canonical_form() {
        let p = parse("int main(){int n,i;scanf(\"%d\",&n);for(i=1;i<=n;i++)printf(\"%d\\n\",i);return 0;}").unwrap();
        let text = pretty_print(&p);
        assert_eq!(
            text,
            "int main() {\n    int n, i;\n    scanf(\"%d\", &n);\n    for (i = 1; i <= n; i++) {\n        printf(\"%d\\n\", i);\n    }\n    return 0;\n}\n"
        );
    }

    #[test]
    fn parenthesizes_by_precedence() {
        for src in ["(a + b) * c", "a - (b - c)", "-(-a)", "!(a < b)", "(float)(a + b)", "a = (b = 1)", "-(--a)"] {
            let p = parse(&format!("int main(){{ int a, b, c; {src}; return 0; }}")).unwrap();
            let again = parse(&pretty_print(&p)).unwrap();
            assert_eq!(p, again, "{src}");
        }
    }

    #[test]
    fn float_literals_round_trip() {
        for v in [0.5, 1.0, 1e-7, 123456789.0, 3.14] {
            let text = float_literal(v);
            let p = parse(&format!("int main(){{ float x; x = {text}; return 0; }}")).unwrap();
            let Stmt::Expr(Expr::Assign { value, .. }) = &p.functions[0].body.stmts[1] else { panic!() };
            assert_eq!(**value, Expr::Float(v));
        }
    }
}
