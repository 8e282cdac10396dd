//! The annotated mini-language: parsing, loop unrolling, DSA conversion,
//! path enumeration, and the concrete interpreter used to confirm witnesses.

pub mod ast;
mod dsa;
mod eval;
mod lexer;
mod parser;
mod paths;
mod unroll;

use std::fmt;

use thiserror::Error;

pub use ast::{BranchOrigin, Cond, Expr, InputDecl, IntervalSpec, Program, Stmt};
pub use dsa::{base_name, to_dsa};
pub use eval::{concrete_eval, real_eval, Compiled, EvalError, Step, StepKind, SuspectHit, Trace, ITERATION_CAP};
pub use parser::parse_program;
pub use paths::{enumerate_paths, Decision, PathKind, PathSystem};
pub use unroll::unroll_loops;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: `{name}` is read before it is assigned on every path")]
    UseBeforeDef { name: String, pos: Pos },
    #[error("{pos}: bad annotation: {msg}")]
    Annotation { pos: Pos, msg: String },
    #[error("empty program")]
    Empty,
    #[error("no @suspect annotation")]
    NoSuspect,
    #[error("{0} @suspect annotations; select one")]
    MultipleSuspects(usize),
    #[error("no @suspect annotation with index {0}")]
    UnknownSuspect(u32),
}

impl FrontendError {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> FrontendError {
        FrontendError::Syntax { pos, msg: msg.into() }
    }
}
