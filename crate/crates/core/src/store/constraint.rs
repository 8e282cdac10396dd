use std::fmt;

use crate::float::FloatValue;
use crate::interval::ArithOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A constraint operand: a store variable or a constant of the store format.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Var(VarId),
    Const(FloatValue),
}

impl Term {
    pub fn var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        }
    }
}

impl From<VarId> for Term {
    fn from(v: VarId) -> Term {
        Term::Var(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Sqrt,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Rel {
    pub fn symbol(&self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
            Rel::Eq => "==",
            Rel::Ne => "!=",
        }
    }

    /// The relation holding exactly when `self` does not (IEEE comparison on
    /// finite values, so the complement of `<` is `>=`).
    pub fn negate(&self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
        }
    }

    /// IEEE comparison; false whenever an operand is NaN.
    pub fn holds(&self, a: f64, b: f64) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
            Rel::Eq => a == b,
            Rel::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `z = round(x op y)`
    Ternary { op: ArithOp, z: VarId, x: Term, y: Term },
    /// `z = round(sqrt x)` or `z = -x`
    Unary { op: UnaryOp, z: VarId, x: Term },
    /// `x rel y`
    Compare { rel: Rel, x: Term, y: Term },
    /// `z = x`
    Assign { z: VarId, x: Term },
}

impl Constraint {
    /// Variables mentioned, with repetitions.
    pub fn vars(&self) -> Vec<VarId> {
        let terms: Vec<Term> = match self {
            Constraint::Ternary { z, x, y, .. } => vec![Term::Var(*z), *x, *y],
            Constraint::Unary { z, x, .. } | Constraint::Assign { z, x } => vec![Term::Var(*z), *x],
            Constraint::Compare { x, y, .. } => vec![*x, *y],
        };
        terms.iter().filter_map(Term::var).collect()
    }

    pub(crate) fn display<'a>(&'a self, names: &'a [String]) -> ConstraintDisplay<'a> {
        ConstraintDisplay { c: self, names }
    }
}

pub(crate) struct ConstraintDisplay<'a> {
    c: &'a Constraint,
    names: &'a [String],
}

impl ConstraintDisplay<'_> {
    fn term(&self, t: &Term) -> String {
        match t {
            Term::Var(v) => self.names[v.index()].clone(),
            Term::Const(c) => c.to_shortest_decimal(),
        }
    }
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: &VarId| &self.names[v.index()];
        match self.c {
            Constraint::Ternary { op, z, x, y } => {
                write!(f, "{} = {} {} {}", name(z), self.term(x), op.symbol(), self.term(y))
            }
            Constraint::Unary { op: UnaryOp::Sqrt, z, x } => write!(f, "{} = sqrt({})", name(z), self.term(x)),
            Constraint::Unary { op: UnaryOp::Neg, z, x } => write!(f, "{} = -{}", name(z), self.term(x)),
            Constraint::Compare { rel, x, y } => write!(f, "{} {} {}", self.term(x), rel.symbol(), self.term(y)),
            Constraint::Assign { z, x } => write!(f, "{} = {}", name(z), self.term(x)),
        }
    }
}
