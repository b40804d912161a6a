//! Scope analysis: binds every variable occurrence to its declaration.

use std::collections::HashMap;

use super::ast::*;
use super::LangError;

impl Program {
    /// Recomputes the declaration table and the binding of every occurrence.
    pub fn resolve(&mut self) -> Result<(), LangError> {
        let mut seen = HashMap::new();
        for (i, f) in self.functions.iter().enumerate() {
            if seen.insert(f.name.clone(), i).is_some() {
                return Err(LangError::DuplicateFunction(f.name.clone()));
            }
        }
        let signatures: HashMap<String, (usize, Type)> = self
            .functions
            .iter()
            .map(|f| (f.name.clone(), (f.params.len(), f.ret)))
            .collect();
        match self.functions.iter().filter(|f| f.name == "main").count() {
            1 => {}
            _ => return Err(LangError::MissingMain),
        }

        let mut vars = Vec::new();
        for (fi, f) in self.functions.iter_mut().enumerate() {
            let mut r = Resolver {
                vars: &mut vars,
                scopes: vec![HashMap::new()],
                function: fi,
                next_slot: 0,
                signatures: &signatures,
            };
            for p in &mut f.params {
                p.id = r.declare(&p.name, p.ty, true)?;
            }
            // parameters and the outermost body declarations share a scope
            r.stmts(&mut f.body.stmts)?;
            f.frame_size = r.next_slot;
        }
        self.vars = vars;
        Ok(())
    }

    /// Consumes and returns the program after resolution.
    pub fn resolved(mut self) -> Result<Program, LangError> {
        self.resolve()?;
        Ok(self)
    }
}

struct Resolver<'a> {
    vars: &'a mut Vec<VarInfo>,
    scopes: Vec<HashMap<String, DeclId>>,
    function: usize,
    next_slot: usize,
    signatures: &'a HashMap<String, (usize, Type)>,
}

impl Resolver<'_> {
    fn declare(&mut self, name: &str, ty: Type, is_param: bool) -> Result<DeclId, LangError> {
        let scope = self.scopes.last_mut().expect("scope stack is never empty");
        if scope.contains_key(name) {
            return Err(LangError::DuplicateDeclaration(name.to_string()));
        }
        let id = self.vars.len();
        self.vars.push(VarInfo {
            name: name.to_string(),
            ty,
            function: self.function,
            slot: self.next_slot,
            is_param,
        });
        self.next_slot += 1;
        scope.insert(name.to_string(), id);
        Ok(id)
    }

    fn lookup(&self, r: &mut VarRef) -> Result<(), LangError> {
        for scope in self.scopes.iter().rev() {
            if let Some(&id) = scope.get(&r.name) {
                r.decl = id;
                return Ok(());
            }
        }
        Err(LangError::Undeclared(r.name.clone()))
    }

    fn block(&mut self, b: &mut Block) -> Result<(), LangError> {
        self.scopes.push(HashMap::new());
        let res = self.stmts(&mut b.stmts);
        self.scopes.pop();
        res
    }

    fn stmts(&mut self, stmts: &mut [Stmt]) -> Result<(), LangError> {
        for s in stmts {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &mut Stmt) -> Result<(), LangError> {
        match s {
            Stmt::Decl { ty, vars } => {
                for d in vars {
                    // the initializer is evaluated before the name is in scope
                    if let Some(init) = &mut d.init {
                        self.expr(init)?;
                    }
                    d.id = self.declare(&d.name, *ty, false)?;
                }
            }
            Stmt::Expr(e) => self.expr(e)?,
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                self.expr(cond)?;
                self.block(then_block)?;
                if let Some(b) = else_block {
                    self.block(b)?;
                }
            }
            Stmt::While { cond, body } => {
                self.expr(cond)?;
                self.block(body)?;
            }
            Stmt::For { init, cond, step, body } => {
                for e in [init, cond, step].into_iter().flatten() {
                    self.expr(e)?;
                }
                self.block(body)?;
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.expr(e)?;
                }
            }
            Stmt::Break | Stmt::Continue => {}
            Stmt::Printf { args, .. } => {
                for a in args {
                    self.expr(a)?;
                }
            }
            Stmt::Scanf { args, .. } => {
                for a in args {
                    self.lookup(a)?;
                }
            }
            Stmt::Block(b) => self.block(b)?,
        }
        Ok(())
    }

    fn expr(&mut self, e: &mut Expr) -> Result<(), LangError> {
        match e {
            Expr::Int(_) | Expr::Float(_) => {}
            Expr::Var(r) => self.lookup(r)?,
            Expr::Unary { expr, .. } | Expr::Cast { expr, .. } => self.expr(expr)?,
            Expr::IncDec { target, .. } => self.lookup(target)?,
            Expr::Binary { lhs, rhs, .. } => {
                self.expr(lhs)?;
                self.expr(rhs)?;
            }
            Expr::Assign { target, value, .. } => {
                self.expr(value)?;
                self.lookup(target)?;
            }
            Expr::Call { name, args } => {
                let Some(&(arity, _)) = self.signatures.get(name.as_str()) else {
                    return Err(LangError::UndeclaredFunction(name.clone()));
                };
                if arity != args.len() {
                    return Err(LangError::Arity {
                        function: name.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                for a in args {
                    self.expr(a)?;
                }
            }
        }
        Ok(())
    }
}
