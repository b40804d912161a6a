//! The mini-C language: syntax tree, parser, printer, interpreter, test
//! suites and variable renaming.

pub mod ast;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod rename;
mod scope;
pub mod suite;
pub mod visit;

pub use ast::{DeclId, Program, Type};
pub use interp::{interpret, interpret_with, ExecutionResult, Limits, RuntimeErrorKind, Status, DEFAULT_STEP_LIMIT};
pub use parser::{parse, parse_expr, parse_stmt};
pub use printer::{pretty_print, print_expr, print_stmt};
pub use rename::{rename_variables, Direction, Renaming};
pub use suite::{normalize_output, run_test_suite, TestCase, TestReport, TestSuite};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("duplicate declaration of `{0}` in the same scope")]
    DuplicateDeclaration(String),
    #[error("program must define exactly one `main` function")]
    MissingMain,
    #[error("function `{0}` is defined twice")]
    DuplicateFunction(String),
    #[error("call to undeclared function `{0}`")]
    UndeclaredFunction(String),
    #[error("`{function}` takes {expected} arguments, {found} given")]
    Arity {
        function: String,
        expected: usize,
        found: usize,
    },
    #[error("test suite has no cases")]
    EmptySuite,
    #[error("incomplete variable mapping: {0}")]
    IncompleteMapping(String),
    #[error("io: {0}")]
    Io(String),
}

impl LangError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        LangError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }
}
