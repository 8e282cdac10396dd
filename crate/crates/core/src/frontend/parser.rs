use std::collections::HashSet;

use crate::float::{parse_decimal, round_nearest_even, FloatFormat, FloatValue, Rounded};
use crate::interval::{ArithOp, FpInterval};
use crate::store::Rel;

use super::ast::{BranchOrigin, Cond, Expr, InputDecl, IntervalSpec, Program, Stmt};
use super::lexer::{tokenize, Tok};
use super::{FrontendError, Pos};

pub fn parse_program(src: &str, format: FloatFormat) -> Result<Program, FrontendError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0, format, next_if: 0, next_loop: 0, next_suspect: 0 };
    let program = p.program()?;
    check_definitions(&program)?;
    Ok(program)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    format: FloatFormat,
    next_if: u32,
    next_loop: u32,
    next_suspect: u32,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, FrontendError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(FrontendError::syntax(
                self.pos(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), FrontendError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(FrontendError::syntax(p, format!("expected identifier, found {}", t.describe()))),
        }
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        let mut inputs: Vec<InputDecl> = Vec::new();
        while *self.peek() == Tok::Input {
            let pos = self.bump().1;
            let (name, _) = self.ident()?;
            self.expect(Tok::In)?;
            let interval = self.interval()?;
            self.expect(Tok::Semi)?;
            if inputs.iter().any(|d| d.name == name) {
                return Err(FrontendError::syntax(pos, format!("input `{name}` declared twice")));
            }
            inputs.push(InputDecl { name, interval, pos });
        }
        let mut body = Vec::new();
        while *self.peek() != Tok::Eof {
            body.push(self.stmt()?);
        }
        if body.is_empty() {
            return Err(FrontendError::Empty);
        }
        Ok(Program { format: self.format, inputs, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(FrontendError::syntax(self.pos(), "unclosed block"));
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(target) => {
                self.bump();
                self.expect(Tok::Assign)?;
                let expr = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign { target, expr, pos })
            }
            Tok::If => {
                self.bump();
                let id = self.next_if;
                self.next_if += 1;
                self.expect(Tok::LParen)?;
                let cond = self.cond()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.block()?;
                let else_branch = if *self.peek() == Tok::Else {
                    self.bump();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If { id, cond, then_branch, else_branch, origin: BranchOrigin::Source, pos })
            }
            Tok::While => {
                self.bump();
                let id = self.next_loop;
                self.next_loop += 1;
                self.expect(Tok::LParen)?;
                let cond = self.cond()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                Ok(Stmt::While { id, cond, body, pos })
            }
            Tok::Suspect => {
                self.bump();
                let (var, _) = self.ident()?;
                self.expect(Tok::In)?;
                let interval = self.interval()?;
                self.expect(Tok::Semi)?;
                let id = self.next_suspect;
                self.next_suspect += 1;
                Ok(Stmt::Suspect { id, var, interval, pos })
            }
            Tok::Input => Err(FrontendError::syntax(pos, "input declarations must precede statements")),
            t => Err(FrontendError::syntax(pos, format!("expected a statement, found {}", t.describe()))),
        }
    }

    fn cond(&mut self) -> Result<Cond, FrontendError> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Lt => Rel::Lt,
            Tok::Le => Rel::Le,
            Tok::Gt => Rel::Gt,
            Tok::Ge => Rel::Ge,
            Tok::EqEq => Rel::Eq,
            Tok::Ne => Rel::Ne,
            t => {
                return Err(FrontendError::syntax(self.pos(), format!("expected a comparison, found {}", t.describe())))
            }
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Cond { lhs, rel, rhs })
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let rhs = self.term()?;
            e = Expr::Bin(op, Box::new(e), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, FrontendError> {
        let mut e = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => return Ok(e),
            };
            self.bump();
            let rhs = self.factor()?;
            e = Expr::Bin(op, Box::new(e), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, FrontendError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Number(text) => self.literal(&text, pos, false),
            Tok::Ident(name) => Ok(Expr::Var(name)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Sqrt => {
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Sqrt(Box::new(e)))
            }
            Tok::Minus => {
                // Negation of a literal is exact, so fold it.
                if let Tok::Number(text) = self.peek().clone() {
                    let p = self.bump().1;
                    return self.literal(&text, p, true);
                }
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            t => Err(FrontendError::syntax(pos, format!("expected an expression, found {}", t.describe()))),
        }
    }

    fn literal(&self, text: &str, pos: Pos, negative: bool) -> Result<Expr, FrontendError> {
        let r = parse_decimal(text).map_err(|_| FrontendError::syntax(pos, format!("malformed number `{text}`")))?;
        let r = if negative { -r } else { r };
        let v = match round_nearest_even(&r, self.format) {
            Rounded::Finite(v) => v,
            Rounded::Overflow { .. } => {
                return Err(FrontendError::syntax(pos, format!("literal `{text}` overflows {}", self.format.name())))
            }
        };
        let value = FloatValue::from_f64(self.format, v).expect("rounded literal is a format value");
        let text = if negative { format!("-{text}") } else { text.to_string() };
        Ok(Expr::Num { value, text })
    }

    fn signed_number(&mut self) -> Result<(String, Pos), FrontendError> {
        let pos = self.pos();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Number(t), _) => Ok((if negative { format!("-{t}") } else { t }, pos)),
            (t, p) => Err(FrontendError::syntax(p, format!("expected a number, found {}", t.describe()))),
        }
    }

    /// Materializes `[a, b]`, `(a, b]`, ... as the floats it contains: each
    /// endpoint is rounded inward exactly, and open endpoints exclude the
    /// bound itself.
    fn interval(&mut self) -> Result<IntervalSpec, FrontendError> {
        let pos = self.pos();
        let lo_open = match self.bump().0 {
            Tok::LBracket => false,
            Tok::LParen => true,
            t => return Err(FrontendError::syntax(pos, format!("expected `[` or `(`, found {}", t.describe()))),
        };
        let (lo_text, lo_pos) = self.signed_number()?;
        self.expect(Tok::Comma)?;
        let (hi_text, hi_pos) = self.signed_number()?;
        let close = self.pos();
        let hi_open = match self.bump().0 {
            Tok::RBracket => false,
            Tok::RParen => true,
            t => return Err(FrontendError::syntax(close, format!("expected `]` or `)`, found {}", t.describe()))),
        };
        let bad = |p: Pos, t: &str| FrontendError::syntax(p, format!("malformed number `{t}`"));
        let lo_r = parse_decimal(&lo_text).map_err(|_| bad(lo_pos, &lo_text))?;
        let hi_r = parse_decimal(&hi_text).map_err(|_| bad(hi_pos, &hi_text))?;
        let text =
            format!("{}{lo_text}, {hi_text}{}", if lo_open { '(' } else { '[' }, if hi_open { ')' } else { ']' });
        // Endpoints round like any other literal; an open end then steps one
        // value inward.
        let f = self.format;
        let endpoint = |r: &num::BigRational, p: Pos, t: &str| match round_nearest_even(r, f) {
            Rounded::Finite(v) => Ok(v),
            Rounded::Overflow { .. } => Err(FrontendError::Annotation {
                pos: p,
                msg: format!("bound `{t}` is outside the finite {} range", f.name()),
            }),
        };
        let mut lo = endpoint(&lo_r, lo_pos, &lo_text)?;
        let mut hi = endpoint(&hi_r, hi_pos, &hi_text)?;
        if lo_open {
            lo = f.next_up(lo);
        }
        if hi_open {
            hi = f.next_down(hi);
        }
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(IntervalSpec { text, domain: FpInterval::from_grid(f, lo, hi) })
        } else {
            Err(FrontendError::Annotation { pos, msg: format!("interval {text} contains no {} value", f.name()) })
        }
    }
}

/// Rejects reads of variables that are not assigned on every path reaching
/// them.
fn check_definitions(p: &Program) -> Result<(), FrontendError> {
    let mut defined: HashSet<String> = p.inputs.iter().map(|d| d.name.clone()).collect();
    check_block(&p.body, &mut defined)
}

fn check_block(stmts: &[Stmt], defined: &mut HashSet<String>) -> Result<(), FrontendError> {
    for s in stmts {
        match s {
            Stmt::Assign { target, expr, pos } => {
                check_expr(expr, defined, *pos)?;
                defined.insert(target.clone());
            }
            Stmt::If { cond, then_branch, else_branch, pos, .. } => {
                check_cond(cond, defined, *pos)?;
                let mut a = defined.clone();
                check_block(then_branch, &mut a)?;
                let mut b = defined.clone();
                check_block(else_branch, &mut b)?;
                *defined = a.intersection(&b).cloned().collect();
            }
            Stmt::While { cond, body, pos, .. } => {
                check_cond(cond, defined, *pos)?;
                let mut inner = defined.clone();
                check_block(body, &mut inner)?;
                check_cond(cond, &inner, *pos)?;
            }
            Stmt::Suspect { var, pos, .. } => {
                if !defined.contains(var) {
                    return Err(FrontendError::UseBeforeDef { name: var.clone(), pos: *pos });
                }
            }
            Stmt::Residual { cond, pos, .. } => check_cond(cond, defined, *pos)?,
        }
    }
    Ok(())
}

fn check_cond(c: &Cond, defined: &HashSet<String>, pos: Pos) -> Result<(), FrontendError> {
    check_expr(&c.lhs, defined, pos)?;
    check_expr(&c.rhs, defined, pos)
}

fn check_expr(e: &Expr, defined: &HashSet<String>, pos: Pos) -> Result<(), FrontendError> {
    match e {
        Expr::Num { .. } => Ok(()),
        Expr::Var(v) if defined.contains(v) => Ok(()),
        Expr::Var(v) => Err(FrontendError::UseBeforeDef { name: v.clone(), pos }),
        Expr::Bin(_, a, b) => {
            check_expr(a, defined, pos)?;
            check_expr(b, defined, pos)
        }
        Expr::Neg(a) | Expr::Sqrt(a) => check_expr(a, defined, pos),
    }
}
