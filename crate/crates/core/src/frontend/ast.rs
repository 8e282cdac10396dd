use std::fmt;

use crate::float::{FloatFormat, FloatValue};
use crate::interval::{ArithOp, FpInterval};
use crate::store::Rel;

use super::Pos;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A literal, already rounded to the program format; `text` is the source
    /// spelling.
    Num {
        value: FloatValue,
        text: String,
    },
    Var(String),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
}

/// Where a conditional came from: the source, or the guard of one unrolled
/// loop iteration (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchOrigin {
    Source,
    Loop { loop_id: u32, iteration: u32 },
}

/// The interval of a suspect annotation or input declaration as written, and
/// its materialization over the format.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec {
    pub text: String,
    pub domain: FpInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Assign {
        target: String,
        expr: Expr,
        pos: Pos,
    },
    If {
        id: u32,
        cond: Cond,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
        origin: BranchOrigin,
        pos: Pos,
    },
    While {
        id: u32,
        cond: Cond,
        body: Vec<Stmt>,
        pos: Pos,
    },
    Suspect {
        id: u32,
        var: String,
        interval: IntervalSpec,
        pos: Pos,
    },
    /// Left after unrolling a loop `k` times: the loop guard evaluated once
    /// more. Executions where it holds lie beyond the unrolling bound.
    Residual {
        loop_id: u32,
        cond: Cond,
        pos: Pos,
        /// Suspect annotations inside the dropped loop body, which executions
        /// past the bound may still reach.
        body_suspects: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputDecl {
    pub name: String,
    pub interval: IntervalSpec,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub format: FloatFormat,
    pub inputs: Vec<InputDecl>,
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn input_names(&self) -> Vec<String> {
        self.inputs.iter().map(|d| d.name.clone()).collect()
    }

    /// Suspect annotations in source order (one entry per annotation id).
    pub fn suspects(&self) -> Vec<(u32, String, IntervalSpec, Pos)> {
        let mut out: Vec<(u32, String, IntervalSpec, Pos)> = Vec::new();
        visit(&self.body, &mut |s| {
            if let Stmt::Suspect { id, var, interval, pos } = s {
                if !out.iter().any(|o| o.0 == *id) {
                    out.push((*id, var.clone(), interval.clone(), *pos));
                }
            }
        });
        out.sort_by_key(|o| o.0);
        out
    }

    pub fn has_loops(&self) -> bool {
        let mut found = false;
        visit(&self.body, &mut |s| found |= matches!(s, Stmt::While { .. }));
        found
    }

    /// Number of conditionals (including unrolled loop guards).
    pub fn count_ifs(&self) -> usize {
        let mut n = 0;
        visit(&self.body, &mut |s| n += matches!(s, Stmt::If { .. }) as usize);
        n
    }
}

/// Pre-order walk over every statement, nested ones included.
pub fn visit<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        match s {
            Stmt::If { then_branch, else_branch, .. } => {
                visit(then_branch, f);
                visit(else_branch, f);
            }
            Stmt::While { body, .. } => visit(body, f),
            _ => {}
        }
    }
}

/// Ids of the suspect annotations in `stmts`, sorted and deduplicated.
pub fn suspect_ids(stmts: &[Stmt]) -> Vec<u32> {
    let mut out = Vec::new();
    visit(stmts, &mut |s| {
        if let Stmt::Suspect { id, .. } = s {
            out.push(*id);
        }
    });
    out.sort_unstable();
    out.dedup();
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { text, .. } => f.write_str(text),
            Expr::Var(v) => f.write_str(v),
            Expr::Bin(op, a, b) => {
                let prec = |op: &ArithOp| matches!(op, ArithOp::Mul | ArithOp::Div) as u8;
                match a.as_ref() {
                    Expr::Bin(inner, _, _) if prec(inner) < prec(op) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " {} ", op.symbol())?;
                // Left-associative: a right operand of equal precedence needs
                // parentheses too.
                match b.as_ref() {
                    Expr::Bin(inner, _, _) if prec(inner) <= prec(op) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Expr::Neg(e) => match e.as_ref() {
                Expr::Bin(..) => write!(f, "-({e})"),
                _ => write!(f, "-{e}"),
            },
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel.symbol(), self.rhs)
    }
}
