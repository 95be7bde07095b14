//! The `.rfs` scenario language.
//!
//! Line-oriented declarations, parsed by recursive descent:
//!
//! ```text
//! system S1
//! observer A1
//! prepare ghz S1 S2 S3
//! interact A1 S1 in Y
//! undo A1 S1
//! context C2 {
//!   measure A2 as A2^W after interact A3 S3
//! }
//! constraint ii: B1^W*A2^W*A3^W = -1
//! ```
//!
//! `docs/grammar.ebnf` holds the full grammar. Parsing checks syntax and that
//! names are declared before use; [`compile`] checks the physics (pairing,
//! undo matching, measurement targets) and lowers to a [`Scenario`].

use std::fmt;

use thiserror::Error;

pub mod ast;
mod compile;
mod lexer;
mod parser;

pub use self::ast::ScenarioAst;
pub use self::compile::{compile, Scenario};
pub use self::parser::parse;

use crate::scenario::Encoding;
use ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}{}", ExpectedList(.expected))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new<S: Into<String>>(span: Span, message: impl Into<String>, expected: Vec<S>) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            message: message.into(),
            expected: expected.into_iter().map(Into::into).collect(),
        }
    }
}

struct ExpectedList<'a>(&'a [String]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            Ok(())
        } else {
            write!(f, " (expected {})", self.0.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct CompileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Either stage's failure, with its position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("semantic error at {0}")]
    Compile(#[from] CompileError),
}

impl DslError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            DslError::Parse(e) => (e.line, e.column),
            DslError::Compile(e) => (e.line, e.column),
        }
    }
}

/// Parse and compile in one step.
pub fn load(source: &str, encoding: Encoding) -> Result<Scenario, DslError> {
    let ast = parse(source)?;
    Ok(compile(&ast, encoding)?)
}
