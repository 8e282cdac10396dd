//! Rounding-aware projections: each one narrows the domains of a single
//! constraint's variables without removing any float solution of it.

use crate::float::{two_sum, Exact, FloatFormat};
use crate::float::{ExactReal, Ratio};
use crate::interval::{ArithOp, FpInterval};

use super::constraint::{Constraint, Rel, Term, UnaryOp, VarId};
use super::preimage::{rounding_preimage, RealInterval};

/// Number of single-float steps a bound may advance while searching for a
/// supported value, per projection call.
const SUPPORT_STEPS: usize = 8;

pub(crate) struct Failed;

/// Domain access for one projection; records which variables shrank.
pub(crate) struct Frame<'a> {
    pub format: FloatFormat,
    pub doms: &'a mut [FpInterval],
    pub changed: &'a mut Vec<VarId>,
}

impl Frame<'_> {
    #[inline]
    fn get(&self, t: &Term) -> FpInterval {
        match t {
            Term::Var(v) => self.doms[v.index()],
            Term::Const(c) => FpInterval::point(self.format, c.to_f64()),
        }
    }

    /// Intersects `t`'s domain with `d`; returns the new domain.
    #[inline]
    fn narrow(&mut self, t: &Term, d: &FpInterval) -> Result<FpInterval, Failed> {
        let old = self.get(t);
        let new = old.intersect(d);
        if new.is_empty() {
            return Err(Failed);
        }
        if let Term::Var(v) = t {
            if new != old {
                self.doms[v.index()] = new;
                if !self.changed.contains(v) {
                    self.changed.push(*v);
                }
            }
        }
        Ok(new)
    }
}

pub(crate) fn project(c: &Constraint, f: &mut Frame) -> Result<(), Failed> {
    match c {
        Constraint::Ternary { op, z, x, y } => ternary(*op, &Term::Var(*z), x, y, f),
        Constraint::Unary { op: UnaryOp::Sqrt, z, x } => sqrt(&Term::Var(*z), x, f),
        Constraint::Unary { op: UnaryOp::Neg, z, x } => {
            let z = Term::Var(*z);
            let zd = f.narrow(&z, &FpInterval::forward_neg(&f.get(x)))?;
            f.narrow(x, &FpInterval::forward_neg(&zd))?;
            Ok(())
        }
        Constraint::Assign { z, x } => {
            let z = Term::Var(*z);
            let zd = f.narrow(&z, &f.get(x))?;
            f.narrow(x, &zd)?;
            Ok(())
        }
        Constraint::Compare { rel, x, y } => compare(*rel, x, y, f),
    }
}

fn bounds(d: &FpInterval) -> (f64, f64) {
    d.bounds().expect("non-empty domain")
}

/// Hull of float bounds over candidate extreme points: the smallest float at
/// or above (strictly above if open) the least candidate, and symmetrically.
fn hull<R: ExactReal>(format: FloatFormat, candidates: &[(R, bool)]) -> FpInterval {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (v, open) in candidates {
        lo = lo.min(format.ceil_bound(v, *open));
        hi = hi.max(format.floor_bound(v, *open));
    }
    if lo.is_infinite() || hi.is_infinite() || lo > hi {
        return FpInterval::empty(format);
    }
    FpInterval::from_grid(format, lo, hi)
}

/// Parts of `d` strictly below and strictly above zero.
fn sign_parts(format: FloatFormat, d: &FpInterval) -> [Option<(f64, f64)>; 2] {
    let (l, h) = bounds(d);
    let tiny = format.min_positive();
    [(l < 0.0).then(|| (l, h.min(-tiny))), (h > 0.0).then(|| (l.max(tiny), h))]
}

/// `{ p / y : p in P, y in Y, y != 0 }`, hulled; `None` when unbounded.
fn quotient_p_by(format: FloatFormat, p: &RealInterval, y: &FpInterval) -> Option<FpInterval> {
    if p.has_zero() && y.contains(0.0) {
        return None;
    }
    let mut out = FpInterval::empty(format);
    for (a, b) in sign_parts(format, y).into_iter().flatten() {
        let c = [
            (Ratio::new(p.lo, a), p.lo_open),
            (Ratio::new(p.lo, b), p.lo_open),
            (Ratio::new(p.hi, a), p.hi_open),
            (Ratio::new(p.hi, b), p.hi_open),
        ];
        out = out.hull(&hull(format, &c));
    }
    Some(out)
}

/// `{ p * y : p in P, y in Y, y != 0 }`, hulled.
fn product_p_by(format: FloatFormat, p: &RealInterval, y: &FpInterval) -> FpInterval {
    let mut out = FpInterval::empty(format);
    for (a, b) in sign_parts(format, y).into_iter().flatten() {
        let c = [
            (Exact::from(p.lo * a), p.lo_open),
            (Exact::from(p.lo * b), p.lo_open),
            (Exact::from(p.hi * a), p.hi_open),
            (Exact::from(p.hi * b), p.hi_open),
        ];
        out = out.hull(&hull(format, &c));
    }
    out
}

/// `{ x / p : x in X, p in P }` for `0 not in P`, hulled.
fn quotient_by_p(format: FloatFormat, x: &FpInterval, p: &RealInterval) -> FpInterval {
    let (a, b) = bounds(x);
    let c = [
        (Ratio::new(a, p.lo), p.lo_open),
        (Ratio::new(a, p.hi), p.hi_open),
        (Ratio::new(b, p.lo), p.lo_open),
        (Ratio::new(b, p.hi), p.hi_open),
    ];
    hull(format, &c)
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    X,
    Y,
}

/// Floats of the other operand that pair with operand value `v` (on `side`)
/// to round into `p`, as an interval hull; `None` if unconstrained.
fn partners(format: FloatFormat, op: ArithOp, side: Side, v: f64, p: &RealInterval) -> Option<FpInterval> {
    let exact_bounds = |lo: Exact, lo_open: bool, hi: Exact, hi_open: bool| {
        let l = format.ceil_bound(&lo, lo_open);
        let h = format.floor_bound(&hi, hi_open);
        if l.is_infinite() || h.is_infinite() || l > h {
            FpInterval::empty(format)
        } else {
            FpInterval::from_grid(format, l, h)
        }
    };
    match (op, side) {
        // x + y in P  =>  other in P - v
        (ArithOp::Add, _) => Some(exact_bounds(two_sum(p.lo, -v), p.lo_open, two_sum(p.hi, -v), p.hi_open)),
        // v - y in P  =>  y in v - P
        (ArithOp::Sub, Side::X) => Some(exact_bounds(two_sum(v, -p.hi), p.hi_open, two_sum(v, -p.lo), p.lo_open)),
        // x - v in P  =>  x in P + v
        (ArithOp::Sub, Side::Y) => Some(exact_bounds(two_sum(p.lo, v), p.lo_open, two_sum(p.hi, v), p.hi_open)),
        (ArithOp::Mul, _) => {
            if v == 0.0 {
                return if p.has_zero() { None } else { Some(FpInterval::empty(format)) };
            }
            let c = [(Ratio::new(p.lo, v), p.lo_open), (Ratio::new(p.hi, v), p.hi_open)];
            Some(hull(format, &c))
        }
        // v / y in P  =>  y in v / P
        (ArithOp::Div, Side::X) => {
            if p.has_zero() {
                return None;
            }
            if v == 0.0 {
                return Some(FpInterval::empty(format));
            }
            let c = [(Ratio::new(v, p.lo), p.lo_open), (Ratio::new(v, p.hi), p.hi_open)];
            Some(hull(format, &c))
        }
        // x / v in P  =>  x in P * v
        (ArithOp::Div, Side::Y) => {
            if v == 0.0 {
                return Some(FpInterval::empty(format));
            }
            let c = [(Exact::from(p.lo * v), p.lo_open), (Exact::from(p.hi * v), p.hi_open)];
            Some(hull(format, &c))
        }
    }
}

fn supported(format: FloatFormat, op: ArithOp, side: Side, v: f64, p: &RealInterval, other: &FpInterval) -> bool {
    match partners(format, op, side, v, p) {
        Some(set) => !set.intersect(other).is_empty(),
        None => true,
    }
}

/// Moves each bound of `d` inward past unsupported values, a few floats at a
/// time.
fn tighten(
    format: FloatFormat,
    op: ArithOp,
    side: Side,
    d: &FpInterval,
    p: &RealInterval,
    other: &FpInterval,
) -> FpInterval {
    let (mut lo, mut hi) = bounds(d);
    for _ in 0..SUPPORT_STEPS {
        if supported(format, op, side, lo, p, other) {
            break;
        }
        if lo == hi {
            return FpInterval::empty(format);
        }
        lo = format.next_up(lo);
    }
    for _ in 0..SUPPORT_STEPS {
        if supported(format, op, side, hi, p, other) {
            break;
        }
        if lo == hi {
            return FpInterval::empty(format);
        }
        hi = format.next_down(hi);
    }
    FpInterval::from_grid(format, lo, hi)
}

fn ternary(op: ArithOp, z: &Term, x: &Term, y: &Term, f: &mut Frame) -> Result<(), Failed> {
    let format = f.format;
    let (xd, yd) = (f.get(x), f.get(y));
    let zd = f.narrow(z, &FpInterval::forward_eval(op, &xd, &yd))?;
    let p = rounding_preimage(&zd);
    let (yl, yh) = bounds(&yd);

    let x_hull = match op {
        ArithOp::Add => Some(hull(format, &[(two_sum(p.lo, -yh), p.lo_open), (two_sum(p.hi, -yl), p.hi_open)])),
        ArithOp::Sub => Some(hull(format, &[(two_sum(p.lo, yl), p.lo_open), (two_sum(p.hi, yh), p.hi_open)])),
        ArithOp::Mul => quotient_p_by(format, &p, &yd),
        ArithOp::Div => Some(product_p_by(format, &p, &yd)),
    };
    let xd = match x_hull {
        Some(h) => f.narrow(x, &h)?,
        None => xd,
    };
    let (xl, xh) = bounds(&xd);

    let y_hull = match op {
        ArithOp::Add => Some(hull(format, &[(two_sum(p.lo, -xh), p.lo_open), (two_sum(p.hi, -xl), p.hi_open)])),
        ArithOp::Sub => Some(hull(format, &[(two_sum(xl, -p.hi), p.hi_open), (two_sum(xh, -p.lo), p.lo_open)])),
        ArithOp::Mul => quotient_p_by(format, &p, &xd),
        ArithOp::Div if p.has_zero() => None,
        ArithOp::Div => Some(quotient_by_p(format, &xd, &p)),
    };
    let yd = match y_hull {
        Some(h) => f.narrow(y, &h)?,
        None => yd,
    };

    let xd = f.narrow(x, &tighten(format, op, Side::X, &xd, &p, &yd))?;
    f.narrow(y, &tighten(format, op, Side::Y, &yd, &p, &xd))?;
    Ok(())
}

fn sqrt(z: &Term, x: &Term, f: &mut Frame) -> Result<(), Failed> {
    let format = f.format;
    let zd = f.narrow(z, &FpInterval::forward_sqrt(&f.get(x)))?;
    let p = rounding_preimage(&zd);
    // round(sqrt(x)) in Z  <=>  sqrt(x) in P, with x >= 0
    let lo = if p.lo < 0.0 { 0.0 } else { format.ceil_bound(&Exact::from(p.lo * p.lo), p.lo_open) };
    let hi = format.floor_bound(&Exact::from(p.hi * p.hi), p.hi_open);
    if p.hi < 0.0 || lo.is_infinite() || hi.is_infinite() || lo > hi {
        return Err(Failed);
    }
    f.narrow(x, &FpInterval::from_grid(format, lo, hi))?;
    Ok(())
}

fn compare(rel: Rel, x: &Term, y: &Term, f: &mut Frame) -> Result<(), Failed> {
    let format = f.format;
    match rel {
        Rel::Gt => return compare(Rel::Lt, y, x, f),
        Rel::Ge => return compare(Rel::Le, y, x, f),
        _ => {}
    }
    let (xd, yd) = (f.get(x), f.get(y));
    let (xl, xh) = bounds(&xd);
    let (yl, yh) = bounds(&yd);
    match rel {
        Rel::Lt => {
            let m = format.max_value();
            f.narrow(x, &FpInterval::from_grid(format, -m, format.next_down(yh)))?;
            f.narrow(y, &FpInterval::from_grid(format, format.next_up(xl), m))?;
        }
        Rel::Le => {
            let m = format.max_value();
            f.narrow(x, &FpInterval::from_grid(format, -m, yh))?;
            f.narrow(y, &FpInterval::from_grid(format, xl, m))?;
        }
        Rel::Eq => {
            let both = xd.intersect(&yd);
            f.narrow(x, &both)?;
            f.narrow(y, &both)?;
        }
        Rel::Ne => {
            if xl == xh {
                f.narrow(y, &exclude_bound(format, &yd, xl))?;
            }
            if yl == yh {
                let xd = f.get(x);
                f.narrow(x, &exclude_bound(format, &xd, yl))?;
            }
        }
        Rel::Gt | Rel::Ge => unreachable!(),
    }
    Ok(())
}

/// `d` without `v` when `v` is one of its bounds.
fn exclude_bound(format: FloatFormat, d: &FpInterval, v: f64) -> FpInterval {
    let (mut l, mut h) = bounds(d);
    if l == v {
        l = format.next_up(l);
    }
    if h == v {
        h = format.next_down(h);
    }
    if l.is_infinite() || h.is_infinite() {
        return FpInterval::empty(format);
    }
    FpInterval::from_grid(format, l, h)
}
