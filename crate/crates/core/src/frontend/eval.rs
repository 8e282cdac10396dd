use std::collections::{BTreeMap, HashMap};

use num::{BigRational, FromPrimitive, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::float::{FloatFormat, FloatValue};
use crate::interval::{ArithOp, FpInterval};
use crate::store::Rel;

use super::ast::{Cond, Expr, Program, Stmt};
use super::dsa::base_name;
use super::Pos;

/// Total loop iterations allowed in one run before it is cut off.
pub const ITERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("missing value for input `{0}`")]
    MissingInput(String),
    #[error("value for `{0}` is not in the program format")]
    FormatMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    If,
    While,
    /// A residual guard of an unrolled loop.
    Residual,
}

/// A branch decision taken during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub kind: StepKind,
    pub id: u32,
    pub pos: Pos,
    pub taken: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuspectHit {
    pub id: u32,
    pub value: f64,
    /// The value lies in the annotated interval and every value computed so
    /// far was finite.
    pub hit: bool,
}

/// Everything observed during one concrete run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    /// Assigned variable and value, in execution order.
    pub assignments: Vec<(String, f64)>,
    pub steps: Vec<Step>,
    pub suspects: Vec<SuspectHit>,
    /// Some computed value was infinite or NaN.
    pub non_finite: bool,
    pub sqrt_of_negative: bool,
    pub division_by_zero: bool,
    /// The run was stopped at [`ITERATION_CAP`].
    pub truncated: bool,
}

impl Trace {
    /// Last value of every source variable, inputs included.
    pub fn final_values(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for (name, v) in &self.assignments {
            out.insert(base_name(name).to_string(), *v);
        }
        out
    }

    pub fn hit(&self, suspect: u32) -> Option<&SuspectHit> {
        self.suspects.iter().find(|s| s.id == suspect && s.hit)
    }
}

#[derive(Debug, Clone)]
enum CExpr {
    Const(f64),
    Slot(usize),
    Bin(ArithOp, Box<CExpr>, Box<CExpr>),
    Neg(Box<CExpr>),
    Sqrt(Box<CExpr>),
}

#[derive(Debug, Clone)]
struct CCond {
    lhs: CExpr,
    rel: Rel,
    rhs: CExpr,
}

#[derive(Debug, Clone)]
enum CStmt {
    Assign(usize, CExpr),
    If { id: u32, pos: Pos, cond: CCond, then_branch: Vec<CStmt>, else_branch: Vec<CStmt> },
    While { id: u32, pos: Pos, cond: CCond, body: Vec<CStmt> },
    Suspect { id: u32, slot: usize, domain: FpInterval },
    Residual { id: u32, pos: Pos, cond: CCond },
}

/// A program with variables resolved to slots, ready to run many times.
#[derive(Debug, Clone)]
pub struct Compiled {
    format: FloatFormat,
    slots: Vec<String>,
    inputs: Vec<String>,
    body: Vec<CStmt>,
}

struct Run<'a> {
    format: FloatFormat,
    slots: &'a [String],
    values: Vec<f64>,
    trace: Trace,
    record: bool,
    iterations: u64,
}

impl Compiled {
    pub fn new(p: &Program) -> Compiled {
        let mut slots: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        for d in &p.inputs {
            slot(&mut slots, &mut names, &d.name);
        }
        let body = compile_block(&p.body, &mut slots, &mut names);
        Compiled { format: p.format, slots: names, inputs: p.input_names(), body }
    }

    pub fn format(&self) -> FloatFormat {
        self.format
    }

    pub fn input_names(&self) -> &[String] {
        &self.inputs
    }

    /// Runs on input values given in declaration order. With `record` off
    /// only the suspect hits and flags are kept.
    pub fn run(&self, inputs: &[f64], record: bool) -> Trace {
        assert_eq!(inputs.len(), self.inputs.len(), "one value per input");
        let mut values = vec![f64::NAN; self.slots.len()];
        values[..inputs.len()].copy_from_slice(inputs);
        let mut r =
            Run { format: self.format, slots: &self.slots, values, trace: Trace::default(), record, iterations: 0 };
        if record {
            for (name, v) in self.inputs.iter().zip(inputs) {
                r.trace.assignments.push((name.clone(), *v));
            }
        }
        r.block(&self.body);
        r.trace
    }

    /// Whether these inputs drive the program into suspect annotation
    /// `suspect`.
    pub fn hits(&self, inputs: &[f64], suspect: u32) -> bool {
        self.run(inputs, false).hit(suspect).is_some()
    }
}

fn slot(slots: &mut HashMap<String, usize>, names: &mut Vec<String>, name: &str) -> usize {
    *slots.entry(name.to_string()).or_insert_with(|| {
        names.push(name.to_string());
        names.len() - 1
    })
}

fn compile_block(stmts: &[Stmt], slots: &mut HashMap<String, usize>, names: &mut Vec<String>) -> Vec<CStmt> {
    stmts
        .iter()
        .map(|s| match s {
            Stmt::Assign { target, expr, .. } => {
                let e = compile_expr(expr, slots, names);
                CStmt::Assign(slot(slots, names, target), e)
            }
            Stmt::If { id, cond, then_branch, else_branch, pos, .. } => CStmt::If {
                id: *id,
                pos: *pos,
                cond: compile_cond(cond, slots, names),
                then_branch: compile_block(then_branch, slots, names),
                else_branch: compile_block(else_branch, slots, names),
            },
            Stmt::While { id, cond, body, pos } => CStmt::While {
                id: *id,
                pos: *pos,
                cond: compile_cond(cond, slots, names),
                body: compile_block(body, slots, names),
            },
            Stmt::Suspect { id, var, interval, .. } => {
                CStmt::Suspect { id: *id, slot: slot(slots, names, var), domain: interval.domain }
            }
            Stmt::Residual { loop_id, cond, pos, .. } => {
                CStmt::Residual { id: *loop_id, pos: *pos, cond: compile_cond(cond, slots, names) }
            }
        })
        .collect()
}

fn compile_cond(c: &Cond, slots: &mut HashMap<String, usize>, names: &mut Vec<String>) -> CCond {
    CCond { lhs: compile_expr(&c.lhs, slots, names), rel: c.rel, rhs: compile_expr(&c.rhs, slots, names) }
}

fn compile_expr(e: &Expr, slots: &mut HashMap<String, usize>, names: &mut Vec<String>) -> CExpr {
    match e {
        Expr::Num { value, .. } => CExpr::Const(value.to_f64()),
        Expr::Var(v) => CExpr::Slot(slot(slots, names, v)),
        Expr::Bin(op, a, b) => {
            let a = compile_expr(a, slots, names);
            CExpr::Bin(*op, Box::new(a), Box::new(compile_expr(b, slots, names)))
        }
        Expr::Neg(a) => CExpr::Neg(Box::new(compile_expr(a, slots, names))),
        Expr::Sqrt(a) => CExpr::Sqrt(Box::new(compile_expr(a, slots, names))),
    }
}

impl Run<'_> {
    /// Returns false once the iteration cap is hit.
    fn block(&mut self, stmts: &[CStmt]) -> bool {
        for s in stmts {
            match s {
                CStmt::Assign(slot, e) => {
                    let v = self.expr(e);
                    self.values[*slot] = v;
                    if self.record {
                        self.trace.assignments.push((self.slots[*slot].clone(), v));
                    }
                }
                CStmt::If { id, pos, cond, then_branch, else_branch } => {
                    let taken = self.cond(cond);
                    self.step(StepKind::If, *id, *pos, taken);
                    if !self.block(if taken { then_branch } else { else_branch }) {
                        return false;
                    }
                }
                CStmt::While { id, pos, cond, body } => loop {
                    let taken = self.cond(cond);
                    self.step(StepKind::While, *id, *pos, taken);
                    if !taken {
                        break;
                    }
                    self.iterations += 1;
                    if self.iterations > ITERATION_CAP {
                        self.trace.truncated = true;
                        return false;
                    }
                    if !self.block(body) {
                        return false;
                    }
                },
                CStmt::Suspect { id, slot, domain } => {
                    let value = self.values[*slot];
                    let hit = !self.trace.non_finite && domain.contains(value);
                    self.trace.suspects.push(SuspectHit { id: *id, value, hit });
                }
                CStmt::Residual { id, pos, cond } => {
                    let taken = self.cond(cond);
                    self.step(StepKind::Residual, *id, *pos, taken);
                }
            }
        }
        true
    }

    fn step(&mut self, kind: StepKind, id: u32, pos: Pos, taken: bool) {
        if self.record {
            self.trace.steps.push(Step { kind, id, pos, taken });
        }
    }

    fn cond(&mut self, c: &CCond) -> bool {
        let a = self.expr(&c.lhs);
        let b = self.expr(&c.rhs);
        c.rel.holds(a, b)
    }

    fn expr(&mut self, e: &CExpr) -> f64 {
        let f = self.format;
        let v = match e {
            CExpr::Const(c) => return *c,
            CExpr::Slot(s) => return self.values[*s],
            CExpr::Bin(op, a, b) => {
                let x = self.expr(a);
                let y = self.expr(b);
                if *op == ArithOp::Div && y == 0.0 {
                    self.trace.division_by_zero = true;
                }
                op.apply(f, x, y)
            }
            CExpr::Neg(a) => -self.expr(a),
            CExpr::Sqrt(a) => {
                let x = self.expr(a);
                if x < 0.0 {
                    self.trace.sqrt_of_negative = true;
                }
                f.sqrt(x)
            }
        };
        if !v.is_finite() {
            self.trace.non_finite = true;
        }
        v
    }
}

/// Runs `p` on named inputs in the program format, recording everything.
pub fn concrete_eval(p: &Program, inputs: &HashMap<String, FloatValue>) -> Result<Trace, EvalError> {
    let mut vals = Vec::with_capacity(p.inputs.len());
    for d in &p.inputs {
        let v = inputs.get(&d.name).ok_or_else(|| EvalError::MissingInput(d.name.clone()))?;
        if v.format() != p.format || !v.is_finite() {
            return Err(EvalError::FormatMismatch(d.name.clone()));
        }
        vals.push(v.to_f64());
    }
    Ok(Compiled::new(p).run(&vals, true))
}

/// Evaluation in exact rational arithmetic (square roots are approximated in
/// `f64`), as a reference for what the program computes over the reals.
///
/// Returns the last value of every variable; `None` marks a division by zero
/// or the square root of a negative number.
pub fn real_eval(
    p: &Program,
    inputs: &HashMap<String, FloatValue>,
) -> Result<BTreeMap<String, Option<f64>>, EvalError> {
    let mut env: HashMap<String, Option<BigRational>> = HashMap::new();
    for d in &p.inputs {
        let v = inputs.get(&d.name).ok_or_else(|| EvalError::MissingInput(d.name.clone()))?;
        env.insert(d.name.clone(), BigRational::from_f64(v.to_f64()));
    }
    let mut budget = 10_000u32;
    real_block(&p.body, &mut env, &mut budget);
    Ok(env.into_iter().map(|(k, v)| (k, v.and_then(|r| r.to_f64()))).collect())
}

fn real_block(stmts: &[Stmt], env: &mut HashMap<String, Option<BigRational>>, budget: &mut u32) {
    for s in stmts {
        match s {
            Stmt::Assign { target, expr, .. } => {
                let v = real_expr(expr, env);
                env.insert(base_name(target).to_string(), v);
            }
            Stmt::If { cond, then_branch, else_branch, .. } => {
                let branch = if real_cond(cond, env) { then_branch } else { else_branch };
                real_block(branch, env, budget);
            }
            Stmt::While { cond, body, .. } => {
                while *budget > 0 && real_cond(cond, env) {
                    *budget -= 1;
                    real_block(body, env, budget);
                }
            }
            Stmt::Suspect { .. } | Stmt::Residual { .. } => {}
        }
    }
}

fn real_cond(c: &Cond, env: &HashMap<String, Option<BigRational>>) -> bool {
    match (real_expr(&c.lhs, env), real_expr(&c.rhs, env)) {
        (Some(a), Some(b)) => match c.rel {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
            Rel::Eq => a == b,
            Rel::Ne => a != b,
        },
        _ => false,
    }
}

fn real_expr(e: &Expr, env: &HashMap<String, Option<BigRational>>) -> Option<BigRational> {
    match e {
        Expr::Num { text, .. } => crate::float::parse_decimal(text).ok(),
        Expr::Var(v) => env.get(v).cloned().flatten(),
        Expr::Bin(op, a, b) => {
            let (a, b) = (real_expr(a, env)?, real_expr(b, env)?);
            match op {
                ArithOp::Add => Some(a + b),
                ArithOp::Sub => Some(a - b),
                ArithOp::Mul => Some(a * b),
                ArithOp::Div if b.is_zero() => None,
                ArithOp::Div => Some(a / b),
            }
        }
        Expr::Neg(a) => real_expr(a, env).map(|r| -r),
        Expr::Sqrt(a) => {
            let r = real_expr(a, env)?;
            if r.is_negative() {
                return None;
            }
            BigRational::from_f64(r.to_f64()?.sqrt())
        }
    }
}
