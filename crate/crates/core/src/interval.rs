//! Closed intervals of finite floats and their forward (direct) evaluation.

use std::fmt;

use thiserror::Error;

use crate::float::{two_sum, Exact, FloatFormat, FloatValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval bounds must be finite values of one format")]
    BadBound,
    #[error("lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    /// The IEEE result of `a op b` in `format` (overflow gives an infinity).
    #[inline]
    pub fn apply(&self, format: FloatFormat, a: f64, b: f64) -> f64 {
        match self {
            ArithOp::Add => format.add(a, b),
            ArithOp::Sub => format.sub(a, b),
            ArithOp::Mul => format.mul(a, b),
            ArithOp::Div => format.div(a, b),
        }
    }
}

/// A closed interval `[lo, hi]` of finite values of one format, or empty.
///
/// Bounds are carried as `f64` (every format value is one exactly) with zero
/// normalized to `+0`.
#[derive(Clone, Copy, PartialEq)]
pub struct FpInterval {
    format: FloatFormat,
    bounds: Option<(f64, f64)>,
}

impl FpInterval {
    pub fn new(lo: FloatValue, hi: FloatValue) -> Result<FpInterval, IntervalError> {
        if lo.format() != hi.format() || !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::BadBound);
        }
        FpInterval::from_f64(lo.format(), lo.to_f64(), hi.to_f64())
    }

    /// Both bounds must be finite values of `format`.
    pub fn from_f64(format: FloatFormat, lo: f64, hi: f64) -> Result<FpInterval, IntervalError> {
        for v in [lo, hi] {
            if !v.is_finite() || format.encode(v).is_err() {
                return Err(IntervalError::BadBound);
            }
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(FpInterval { format, bounds: Some((lo + 0.0, hi + 0.0)) })
    }

    /// Grid bounds already known to be valid; `lo > hi` yields empty.
    #[inline]
    pub(crate) fn from_grid(format: FloatFormat, lo: f64, hi: f64) -> FpInterval {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return FpInterval::empty(format);
        }
        debug_assert!(lo.is_finite() && hi.is_finite());
        FpInterval { format, bounds: Some((lo + 0.0, hi + 0.0)) }
    }

    pub fn empty(format: FloatFormat) -> FpInterval {
        FpInterval { format, bounds: None }
    }

    /// Every finite value of the format.
    pub fn full(format: FloatFormat) -> FpInterval {
        let m = format.max_value();
        FpInterval { format, bounds: Some((-m, m)) }
    }

    pub fn singleton(v: FloatValue) -> Result<FpInterval, IntervalError> {
        FpInterval::new(v, v)
    }

    #[inline]
    pub(crate) fn point(format: FloatFormat, v: f64) -> FpInterval {
        FpInterval::from_grid(format, v, v)
    }

    #[inline]
    pub fn format(&self) -> FloatFormat {
        self.format
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    #[inline]
    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn lo(&self) -> Option<FloatValue> {
        self.bounds.map(|(l, _)| FloatValue::from_grid(self.format, l))
    }

    pub fn hi(&self) -> Option<FloatValue> {
        self.bounds.map(|(_, h)| FloatValue::from_grid(self.format, h))
    }

    #[inline]
    pub fn is_singleton(&self) -> bool {
        matches!(self.bounds, Some((l, h)) if l == h)
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        matches!(self.bounds, Some((l, h)) if l <= v && v <= h)
    }

    pub fn contains_value(&self, v: &FloatValue) -> bool {
        v.format() == self.format && v.is_finite() && self.contains(v.to_f64())
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &FpInterval) -> bool {
        match (self.bounds, other.bounds) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => c <= a && b <= d,
        }
    }

    #[inline]
    pub fn intersect(&self, other: &FpInterval) -> FpInterval {
        debug_assert_eq!(self.format, other.format);
        match (self.bounds, other.bounds) {
            (Some((a, b)), Some((c, d))) => FpInterval::from_grid(self.format, a.max(c), b.min(d)),
            _ => FpInterval::empty(self.format),
        }
    }

    pub fn hull(&self, other: &FpInterval) -> FpInterval {
        debug_assert_eq!(self.format, other.format);
        match (self.bounds, other.bounds) {
            (Some((a, b)), Some((c, d))) => FpInterval::from_grid(self.format, a.min(c), b.max(d)),
            (Some(_), None) => *self,
            _ => *other,
        }
    }

    /// `hi - lo` as an exact real; zero for the empty interval.
    pub fn width(&self) -> Exact {
        match self.bounds {
            Some((l, h)) => two_sum(h, -l),
            None => Exact::from(0.0),
        }
    }

    /// Number of floats in the interval.
    pub fn count(&self) -> u64 {
        match self.bounds {
            Some((l, h)) => (self.format.ordinal_of(h) - self.format.ordinal_of(l) + 1) as u64,
            None => 0,
        }
    }

    /// Smallest interval holding `round(x op y)` for every `x` in `x`, `y` in
    /// `y` whose rounded result is finite.
    pub fn forward_eval(op: ArithOp, x: &FpInterval, y: &FpInterval) -> FpInterval {
        let format = x.format;
        let (Some((xl, xh)), Some((yl, yh))) = (x.bounds, y.bounds) else {
            return FpInterval::empty(format);
        };
        match op {
            ArithOp::Add => clip(format, format.add(xl, yl), format.add(xh, yh)),
            ArithOp::Sub => clip(format, format.sub(xl, yh), format.sub(xh, yl)),
            ArithOp::Mul => {
                let (lo, hi) = corners(format, ArithOp::Mul, xl, xh, yl, yh);
                clip(format, lo, hi)
            }
            ArithOp::Div => {
                // Split the divisor by sign; a zero divisor never yields a
                // finite value.
                let tiny = format.min_positive();
                let mut out = FpInterval::empty(format);
                if yl < 0.0 {
                    let (lo, hi) = corners(format, ArithOp::Div, xl, xh, yl, yh.min(-tiny));
                    out = out.hull(&clip(format, lo, hi));
                }
                if yh > 0.0 {
                    let (lo, hi) = corners(format, ArithOp::Div, xl, xh, yl.max(tiny), yh);
                    out = out.hull(&clip(format, lo, hi));
                }
                out
            }
        }
    }

    /// Image of rounded square root over the non-negative part of `x`.
    pub fn forward_sqrt(x: &FpInterval) -> FpInterval {
        let format = x.format;
        match x.bounds {
            Some((l, h)) if h >= 0.0 => FpInterval::from_grid(format, format.sqrt(l.max(0.0)), format.sqrt(h)),
            _ => FpInterval::empty(format),
        }
    }

    pub fn forward_neg(x: &FpInterval) -> FpInterval {
        match x.bounds {
            Some((l, h)) => FpInterval::from_grid(x.format, -h, -l),
            None => *x,
        }
    }
}

/// Min and max of the rounded corner results; rounding is monotone, so these
/// are the rounded extreme real values.
#[inline]
fn corners(format: FloatFormat, op: ArithOp, xl: f64, xh: f64, yl: f64, yh: f64) -> (f64, f64) {
    let c = [op.apply(format, xl, yl), op.apply(format, xl, yh), op.apply(format, xh, yl), op.apply(format, xh, yh)];
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Drops the overflowing part of a rounded range `[lo, hi]`.
#[inline]
fn clip(format: FloatFormat, lo: f64, hi: f64) -> FpInterval {
    let m = format.max_value();
    if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return FpInterval::empty(format);
    }
    FpInterval::from_grid(format, lo.max(-m), hi.min(m))
}

impl fmt::Display for FpInterval {
    /// `[lo, hi] {bits: 0x…, 0x…}`; `∅` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo(), self.hi()) {
            (Some(l), Some(h)) => write!(
                f,
                "[{}, {}] {{bits: {}, {}}}",
                l.to_shortest_decimal(),
                h.to_shortest_decimal(),
                l.to_hex(),
                h.to_hex()
            ),
            _ => f.write_str("∅"),
        }
    }
}

impl fmt::Debug for FpInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo(), self.hi()) {
            (Some(l), Some(h)) => {
                write!(f, "[{}, {}]", l.to_shortest_decimal(), h.to_shortest_decimal())
            }
            _ => f.write_str("∅"),
        }
    }
}
