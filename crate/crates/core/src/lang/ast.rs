//! Syntax tree for the mini-C subset.
//!
//! Variable occurrences carry the id of the declaration they resolve to. Ids
//! are assigned by [`Program::resolve`] in declaration pre-order (parameters
//! first, then body declarations), so any transformation that adds, removes
//! or reorders declarations must re-resolve before the ids are meaningful.

use serde::{Deserialize, Serialize};

/// Index of a variable declaration in [`Program::vars`].
pub type DeclId = usize;

/// Marker stored in unresolved references.
pub const UNRESOLVED: DeclId = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    Float,
    Void,
}

impl Type {
    pub fn keyword(self) -> &'static str {
        match self {
            Type::Int => "int",
            Type::Float => "float",
            Type::Void => "void",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub functions: Vec<Function>,
    /// Declaration table filled by resolution.
    pub vars: Vec<VarInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub ty: Type,
    /// Index of the enclosing function.
    pub function: usize,
    /// Frame slot inside the enclosing function.
    pub slot: usize,
    pub is_param: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    /// Number of frame slots (parameters plus locals), set by resolution.
    pub frame_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: Type,
    pub name: String,
    pub id: DeclId,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Block { stmts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub id: DeclId,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Decl {
        ty: Type,
        vars: Vec<Declarator>,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    For {
        init: Option<Expr>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Block,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Printf {
        format: String,
        args: Vec<Expr>,
    },
    Scanf {
        format: String,
        args: Vec<VarRef>,
    },
    Block(Block),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRef {
    pub name: String,
    pub decl: DeclId,
}

impl VarRef {
    pub fn new(name: impl Into<String>) -> Self {
        VarRef {
            name: name.into(),
            decl: UNRESOLVED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IncDecOp {
    PreInc,
    PostInc,
    PreDec,
    PostDec,
}

impl IncDecOp {
    pub fn is_increment(self) -> bool {
        matches!(self, IncDecOp::PreInc | IncDecOp::PostInc)
    }

    pub fn is_prefix(self) -> bool {
        matches!(self, IncDecOp::PreInc | IncDecOp::PreDec)
    }

    /// Prefix form becomes postfix and vice versa.
    pub fn mirrored(self) -> Self {
        match self {
            IncDecOp::PreInc => IncDecOp::PostInc,
            IncDecOp::PostInc => IncDecOp::PreInc,
            IncDecOp::PreDec => IncDecOp::PostDec,
            IncDecOp::PostDec => IncDecOp::PreDec,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub const COMPARISONS: [BinOp; 6] = [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_comparison(self) -> bool {
        Self::COMPARISONS.contains(&self)
    }

    /// Operator that keeps the meaning when both operands are swapped.
    /// Only defined for comparisons.
    pub fn mirrored(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Lt => BinOp::Gt,
            BinOp::Gt => BinOp::Lt,
            BinOp::Le => BinOp::Ge,
            BinOp::Ge => BinOp::Le,
            BinOp::Eq => BinOp::Eq,
            BinOp::Ne => BinOp::Ne,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Rem => "%=",
        }
    }

    pub fn binop(self) -> Option<BinOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinOp::Add),
            AssignOp::Sub => Some(BinOp::Sub),
            AssignOp::Mul => Some(BinOp::Mul),
            AssignOp::Div => Some(BinOp::Div),
            AssignOp::Rem => Some(BinOp::Rem),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i32),
    Float(f64),
    Var(VarRef),
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    IncDec {
        op: IncDecOp,
        target: VarRef,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        target: VarRef,
        value: Box<Expr>,
    },
    Cast {
        ty: Type,
        expr: Box<Expr>,
    },
    Call {
        name: String,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(VarRef::new(name))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn not(expr: Expr) -> Expr {
        Expr::Unary {
            op: UnaryOp::Not,
            expr: Box::new(expr),
        }
    }
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Stable textual key for a declaration.
    ///
    /// The bare name when it is unique in the program, `func::name` when the
    /// name is declared in several functions, and `func::name#k` when it is
    /// declared more than once inside one function (k counts in pre-order).
    pub fn var_key(&self, id: DeclId) -> String {
        let info = &self.vars[id];
        let same_name: Vec<DeclId> = (0..self.vars.len()).filter(|&v| self.vars[v].name == info.name).collect();
        if same_name.len() == 1 {
            return info.name.clone();
        }
        let func = &self.functions[info.function].name;
        let in_func: Vec<DeclId> = same_name
            .into_iter()
            .filter(|&v| self.vars[v].function == info.function)
            .collect();
        if in_func.len() == 1 {
            format!("{func}::{}", info.name)
        } else {
            let k = in_func.iter().position(|&v| v == id).unwrap_or(0);
            format!("{func}::{}#{k}", info.name)
        }
    }

    pub fn var_keys(&self) -> Vec<String> {
        (0..self.vars.len()).map(|v| self.var_key(v)).collect()
    }
}
