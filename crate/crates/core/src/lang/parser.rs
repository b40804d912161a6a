//! Recursive-descent parser producing a resolved [`Program`].

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::LangError;

/// Parses and scope-checks a mini-C translation unit.
pub fn parse(source: &str) -> Result<Program, LangError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut functions = Vec::new();
    while !p.at(&Tok::Eof) {
        functions.push(p.function()?);
    }
    let mut program = Program {
        functions,
        vars: Vec::new(),
    };
    program.resolve()?;
    Ok(program)
}

/// Parses a single statement in the context of nothing. References stay
/// unresolved until the statement is spliced into a program.
pub fn parse_stmt(source: &str) -> Result<Stmt, LangError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut stmts = Vec::new();
    p.stmt_into(&mut stmts)?;
    p.expect(&Tok::Eof)?;
    match stmts.len() {
        1 => Ok(stmts.pop().unwrap()),
        _ => Err(LangError::syntax(1, 1, "expected exactly one statement")),
    }
}

/// Parses a single expression with unresolved references.
pub fn parse_expr(source: &str) -> Result<Expr, LangError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Float(v) => format!("number `{v}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> LangError {
        let t = &self.tokens[self.pos];
        LangError::syntax(t.line, t.col, msg)
    }

    fn expect(&mut self, t: &Tok) -> Result<(), LangError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", describe(t), describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn type_kw(&self) -> Option<Type> {
        match self.peek() {
            Tok::KwInt => Some(Type::Int),
            Tok::KwFloat => Some(Type::Float),
            Tok::KwVoid => Some(Type::Void),
            _ => None,
        }
    }

    fn function(&mut self) -> Result<Function, LangError> {
        let ret = self.type_kw().ok_or_else(|| self.error("expected a function definition"))?;
        self.bump();
        let name = self.ident()?;
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if self.at(&Tok::KwVoid) && self.peek_at(1) == &Tok::RParen {
            self.bump();
        }
        if !self.at(&Tok::RParen) {
            loop {
                let ty = match self.type_kw() {
                    Some(Type::Void) | None => return Err(self.error("expected parameter type")),
                    Some(t) => t,
                };
                self.bump();
                let name = self.ident()?;
                params.push(Param { ty, name, id: UNRESOLVED });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        let body = self.block()?;
        Ok(Function {
            ret,
            name,
            params,
            body,
            frame_size: 0,
        })
    }

    fn block(&mut self) -> Result<Block, LangError> {
        self.expect(&Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return Err(self.error("unexpected end of input, expected `}`"));
            }
            self.stmt_into(&mut stmts)?;
        }
        self.bump();
        Ok(Block { stmts })
    }

    /// Body of a control statement: a braced block or a single statement.
    fn body(&mut self) -> Result<Block, LangError> {
        if self.at(&Tok::LBrace) {
            self.block()
        } else {
            let mut stmts = Vec::new();
            self.stmt_into(&mut stmts)?;
            Ok(Block { stmts })
        }
    }

    fn stmt_into(&mut self, out: &mut Vec<Stmt>) -> Result<(), LangError> {
        let stmt = match self.peek().clone() {
            Tok::Semi => {
                self.bump();
                return Ok(());
            }
            Tok::LBrace => Stmt::Block(self.block()?),
            Tok::KwInt | Tok::KwFloat => {
                let ty = self.type_kw().unwrap();
                self.bump();
                let mut vars = Vec::new();
                loop {
                    let name = self.ident()?;
                    let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
                    vars.push(Declarator { name, id: UNRESOLVED, init });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::Semi)?;
                Stmt::Decl { ty, vars }
            }
            Tok::KwVoid => return Err(self.error("`void` variables are not allowed")),
            Tok::KwIf => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(&Tok::RParen)?;
                let then_block = self.body()?;
                let else_block = if self.eat(&Tok::KwElse) { Some(self.body()?) } else { None };
                Stmt::If {
                    cond,
                    then_block,
                    else_block,
                }
            }
            Tok::KwWhile => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(&Tok::RParen)?;
                let body = self.body()?;
                Stmt::While { cond, body }
            }
            Tok::KwFor => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let init = if self.at(&Tok::Semi) { None } else { Some(self.expr()?) };
                self.expect(&Tok::Semi)?;
                let cond = if self.at(&Tok::Semi) { None } else { Some(self.expr()?) };
                self.expect(&Tok::Semi)?;
                let step = if self.at(&Tok::RParen) { None } else { Some(self.expr()?) };
                self.expect(&Tok::RParen)?;
                let body = self.body()?;
                Stmt::For { init, cond, step, body }
            }
            Tok::KwReturn => {
                self.bump();
                let value = if self.at(&Tok::Semi) { None } else { Some(self.expr()?) };
                self.expect(&Tok::Semi)?;
                Stmt::Return(value)
            }
            Tok::KwBreak => {
                self.bump();
                self.expect(&Tok::Semi)?;
                Stmt::Break
            }
            Tok::KwContinue => {
                self.bump();
                self.expect(&Tok::Semi)?;
                Stmt::Continue
            }
            Tok::Ident(name) if name == "printf" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let format = self.string_lit()?;
                let mut args = Vec::new();
                while self.eat(&Tok::Comma) {
                    args.push(self.expr()?);
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Semi)?;
                Stmt::Printf { format, args }
            }
            Tok::Ident(name) if name == "scanf" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let format = self.string_lit()?;
                let mut args = Vec::new();
                while self.eat(&Tok::Comma) {
                    // `&` is accepted and discarded
                    self.eat(&Tok::Amp);
                    args.push(VarRef::new(self.ident()?));
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Semi)?;
                Stmt::Scanf { format, args }
            }
            _ => {
                let e = self.expr()?;
                self.expect(&Tok::Semi)?;
                Stmt::Expr(e)
            }
        };
        out.push(stmt);
        Ok(())
    }

    fn string_lit(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                // adjacent literals concatenate
                let mut s = s;
                while let Tok::Str(more) = self.peek().clone() {
                    self.bump();
                    s.push_str(&more);
                }
                Ok(s)
            }
            other => Err(self.error(format!("expected format string, found {}", describe(&other)))),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, LangError> {
        if let Tok::Ident(name) = self.peek().clone() {
            let op = match self.peek_at(1) {
                Tok::Assign => Some(AssignOp::Set),
                Tok::PlusEq => Some(AssignOp::Add),
                Tok::MinusEq => Some(AssignOp::Sub),
                Tok::StarEq => Some(AssignOp::Mul),
                Tok::SlashEq => Some(AssignOp::Div),
                Tok::PercentEq => Some(AssignOp::Rem),
                _ => None,
            };
            if let Some(op) = op {
                self.bump();
                self.bump();
                let value = self.expr()?;
                return Ok(Expr::Assign {
                    op,
                    target: VarRef::new(name),
                    value: Box::new(value),
                });
            }
        }
        self.binary(0)
    }

    fn binary(&mut self, min_level: u8) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        loop {
            let Some(op) = binop_of(self.peek()) else { break };
            let level = precedence(op);
            if level < min_level {
                break;
            }
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                let e = self.unary()?;
                Ok(Expr::Unary {
                    op: UnaryOp::Neg,
                    expr: Box::new(e),
                })
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            Tok::Bang => {
                self.bump();
                let e = self.unary()?;
                Ok(Expr::not(e))
            }
            Tok::PlusPlus | Tok::MinusMinus => {
                let op = if self.bump() == Tok::PlusPlus { IncDecOp::PreInc } else { IncDecOp::PreDec };
                let name = self.ident()?;
                Ok(Expr::IncDec {
                    op,
                    target: VarRef::new(name),
                })
            }
            Tok::LParen if matches!(self.peek_at(1), Tok::KwInt | Tok::KwFloat) && self.peek_at(2) == &Tok::RParen => {
                self.bump();
                let ty = if self.bump() == Tok::KwInt { Type::Int } else { Type::Float };
                self.bump();
                let e = self.unary()?;
                Ok(Expr::Cast { ty, expr: Box::new(e) })
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                let v = i32::try_from(v).map_err(|_| self.error("integer literal out of range"))?;
                Ok(Expr::Int(v))
            }
            Tok::Float(v) => {
                self.bump();
                Ok(Expr::Float(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "printf" || name == "scanf" {
                    return Err(self.error(format!("`{name}` is only supported as a statement")));
                }
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.at(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    return Ok(Expr::Call { name, args });
                }
                let op = match self.peek() {
                    Tok::PlusPlus => Some(IncDecOp::PostInc),
                    Tok::MinusMinus => Some(IncDecOp::PostDec),
                    _ => None,
                };
                match op {
                    Some(op) => {
                        self.bump();
                        Ok(Expr::IncDec {
                            op,
                            target: VarRef::new(name),
                        })
                    }
                    None => Ok(Expr::Var(VarRef::new(name))),
                }
            }
            other => Err(self.error(format!("expected expression, found {}", describe(&other)))),
        }
    }
}

fn binop_of(t: &Tok) -> Option<BinOp> {
    Some(match t {
        Tok::Plus => BinOp::Add,
        Tok::Minus => BinOp::Sub,
        Tok::Star => BinOp::Mul,
        Tok::Slash => BinOp::Div,
        Tok::Percent => BinOp::Rem,
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        Tok::Gt => BinOp::Gt,
        Tok::Ge => BinOp::Ge,
        Tok::EqEq => BinOp::Eq,
        Tok::Ne => BinOp::Ne,
        Tok::AndAnd => BinOp::And,
        Tok::OrOr => BinOp::Or,
        _ => return None,
    })
}

/// Binding strength of binary operators; higher binds tighter.
pub(crate) fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
    }
}
