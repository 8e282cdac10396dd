use std::cmp::Ordering;
use std::fmt;

use super::exact::{two_sum, Exact};
use super::FloatError;

/// A binary interchange-style format with round-to-nearest-even semantics.
///
/// Values of a format are carried as `f64` ("grid values") throughout the
/// crate; [`FloatFormat::encode`] and [`FloatFormat::decode`] convert to and
/// from the bit pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FloatFormat {
    exponent_bits: u8,
    mantissa_bits: u8,
}

/// Result of rounding an exact real into a format.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rounded {
    Finite(f64),
    Overflow { negative: bool },
}

impl Rounded {
    /// The IEEE result: overflow becomes a signed infinity.
    pub fn to_f64(self) -> f64 {
        match self {
            Rounded::Finite(v) => v,
            Rounded::Overflow { negative: false } => f64::INFINITY,
            Rounded::Overflow { negative: true } => f64::NEG_INFINITY,
        }
    }
}

/// An exact real quantity that can be compared against short `f64` values
/// (format values and midpoints between neighbours, at most 25 significant
/// bits).
pub(crate) trait ExactReal {
    fn approx(&self) -> f64;
    fn cmp_short(&self, f: f64) -> Ordering;
}

impl ExactReal for Exact {
    #[inline]
    fn approx(&self) -> f64 {
        self.hi
    }
    #[inline]
    fn cmp_short(&self, f: f64) -> Ordering {
        self.cmp_f64(f)
    }
}

/// `num / den` with `den > 0`, both short `f64` values so that `f * den` is
/// exact for every short `f`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ratio {
    num: f64,
    den: f64,
}

impl Ratio {
    pub(crate) fn new(num: f64, den: f64) -> Ratio {
        debug_assert!(den != 0.0);
        if den < 0.0 {
            Ratio { num: -num, den: -den }
        } else {
            Ratio { num, den }
        }
    }
}

impl ExactReal for Ratio {
    #[inline]
    fn approx(&self) -> f64 {
        self.num / self.den
    }
    #[inline]
    fn cmp_short(&self, f: f64) -> Ordering {
        let p = f * self.den;
        self.num.partial_cmp(&p).expect("NaN in exact arithmetic")
    }
}

/// `sqrt(x)` for a short `x >= 0`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SqrtOf(pub(crate) f64);

impl ExactReal for SqrtOf {
    #[inline]
    fn approx(&self) -> f64 {
        self.0.sqrt()
    }
    #[inline]
    fn cmp_short(&self, f: f64) -> Ordering {
        if f < 0.0 {
            return Ordering::Greater;
        }
        self.0.partial_cmp(&(f * f)).expect("NaN in exact arithmetic")
    }
}

#[inline]
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `floor(log2(a))` for finite `a > 0`.
#[inline]
fn exponent_of(a: f64) -> i32 {
    let field = ((a.to_bits() >> 52) & 0x7ff) as i32;
    if field == 0 {
        exponent_of(a * pow2(64)) - 64
    } else {
        field - 1023
    }
}

#[inline]
fn is_pow2(a: f64) -> bool {
    a.to_bits() & ((1u64 << 52) - 1) == 0
}

impl FloatFormat {
    pub const BINARY32: FloatFormat = FloatFormat { exponent_bits: 8, mantissa_bits: 23 };
    /// The 8-bit (4, 3) format small enough to enumerate exhaustively.
    pub const MINI: FloatFormat = FloatFormat { exponent_bits: 4, mantissa_bits: 3 };

    pub fn new(exponent_bits: u8, mantissa_bits: u8) -> Result<FloatFormat, FloatError> {
        if !(2..=8).contains(&exponent_bits) || !(1..=23).contains(&mantissa_bits) {
            return Err(FloatError::InvalidFormat { exponent_bits, mantissa_bits });
        }
        Ok(FloatFormat { exponent_bits, mantissa_bits })
    }

    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits as u32
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits as u32
    }

    pub fn name(&self) -> String {
        if *self == Self::BINARY32 {
            "binary32".to_string()
        } else {
            format!("e{}m{}", self.exponent_bits, self.mantissa_bits)
        }
    }

    #[inline]
    pub fn is_binary32(&self) -> bool {
        *self == Self::BINARY32
    }

    pub fn width(&self) -> u32 {
        1 + self.exponent_bits() + self.mantissa_bits()
    }

    pub fn bias(&self) -> i32 {
        (1 << (self.exponent_bits - 1)) - 1
    }

    pub fn emin(&self) -> i32 {
        1 - self.bias()
    }

    pub fn emax(&self) -> i32 {
        self.bias()
    }

    pub(crate) fn sign_mask(&self) -> u32 {
        1 << (self.exponent_bits() + self.mantissa_bits())
    }

    /// Magnitude bits of the largest finite value.
    pub fn max_magnitude_bits(&self) -> u32 {
        (((1u32 << self.exponent_bits) - 1) << self.mantissa_bits) - 1
    }

    /// Number of finite values, counting the two zeros once.
    pub fn finite_count(&self) -> u64 {
        2 * ((1u64 << self.exponent_bits) - 1) * (1u64 << self.mantissa_bits) - 1
    }

    pub fn max_value(&self) -> f64 {
        (2.0 - pow2(-(self.mantissa_bits as i32))) * pow2(self.emax())
    }

    /// Smallest positive subnormal.
    pub fn min_positive(&self) -> f64 {
        pow2(self.emin() - self.mantissa_bits as i32)
    }

    pub fn min_normal(&self) -> f64 {
        pow2(self.emin())
    }

    /// `2^(emax+1)`, the virtual successor of the largest finite value.
    pub(crate) fn overflow_threshold(&self) -> f64 {
        pow2(self.emax() + 1)
    }

    /// Spacing of the format grid in the binade containing `a >= 0`.
    #[inline]
    fn quantum(&self, a: f64) -> f64 {
        if a < self.min_normal() {
            self.min_positive()
        } else {
            pow2(exponent_of(a) - self.mantissa_bits as i32)
        }
    }

    pub fn decode(&self, bits: u32) -> f64 {
        if self.is_binary32() {
            return f32::from_bits(bits) as f64;
        }
        let m = self.mantissa_bits();
        let e = self.exponent_bits();
        let negative = bits & self.sign_mask() != 0;
        let field = (bits >> m) & ((1 << e) - 1);
        let mant = bits & ((1 << m) - 1);
        let mag = if field == (1 << e) - 1 {
            if mant == 0 {
                f64::INFINITY
            } else {
                f64::NAN
            }
        } else if field == 0 {
            mant as f64 * self.min_positive()
        } else {
            ((1u64 << m) + mant as u64) as f64 * pow2(field as i32 - self.bias() - m as i32)
        };
        if negative {
            -mag
        } else {
            mag
        }
    }

    /// Bit pattern of `v`, which must be a value of this format (or an
    /// infinity / NaN). The sign of zero is preserved.
    pub fn encode(&self, v: f64) -> Result<u32, FloatError> {
        if self.is_binary32() {
            let f = v as f32;
            if !v.is_nan() && f as f64 != v {
                return Err(FloatError::NotRepresentable(v));
            }
            return Ok(f.to_bits());
        }
        let m = self.mantissa_bits();
        let e = self.exponent_bits();
        let sign = if v.is_sign_negative() { self.sign_mask() } else { 0 };
        if v.is_nan() {
            return Ok((((1 << e) - 1) << m) | (1 << (m - 1)));
        }
        let a = v.abs();
        if a.is_infinite() {
            return Ok(sign | (((1 << e) - 1) << m));
        }
        if a == 0.0 {
            return Ok(sign);
        }
        if a > self.max_value() {
            return Err(FloatError::NotRepresentable(v));
        }
        let n = a / self.quantum(a);
        if n.fract() != 0.0 {
            return Err(FloatError::NotRepresentable(v));
        }
        if a < self.min_normal() {
            Ok(sign | n as u32)
        } else {
            let field = (exponent_of(a) + self.bias()) as u32;
            Ok(sign | (field << m) | (n as u32 - (1 << m)))
        }
    }

    /// Ordinal of a finite grid value (zeros at 0).
    #[inline]
    pub fn ordinal_of(&self, v: f64) -> i64 {
        let bits = self.encode(v).expect("finite grid value");
        let mag = (bits & (self.sign_mask() - 1)) as i64;
        if v < 0.0 {
            -mag
        } else {
            mag
        }
    }

    /// Grid value at ordinal `n`; `None` outside the finite range.
    #[inline]
    pub fn at_ordinal(&self, n: i64) -> Option<f64> {
        if n.unsigned_abs() > self.max_magnitude_bits() as u64 {
            return None;
        }
        let mag = self.decode(n.unsigned_abs() as u32);
        Some(if n < 0 { -mag } else { mag })
    }

    /// Whether the finite grid value `f` has an even last mantissa bit.
    /// The overflow threshold counts as even, so ties there round to infinity.
    pub fn is_even(&self, f: f64) -> bool {
        let a = f.abs();
        if a == 0.0 {
            return true;
        }
        let n = a / self.quantum(a);
        (n as u64).is_multiple_of(2)
    }

    /// Next grid value above `f`; `+inf` past the largest finite value.
    #[inline]
    pub fn next_up(&self, f: f64) -> f64 {
        if f < 0.0 {
            return -self.next_down(-f);
        }
        if f >= self.max_value() {
            return f64::INFINITY;
        }
        f + self.quantum(f)
    }

    /// Next grid value below `f`; `-inf` past the most negative finite value.
    #[inline]
    pub fn next_down(&self, f: f64) -> f64 {
        if f <= 0.0 {
            let r = -self.next_up(-f);
            return if r == 0.0 { 0.0 } else { r };
        }
        let q = self.quantum(f);
        let step = if f > self.min_normal() && is_pow2(f) { q * 0.5 } else { q };
        f - step + 0.0
    }

    /// Largest grid value `<= v`; clamps to the largest finite value above the
    /// range and yields `-inf` below it.
    pub fn floor(&self, v: f64) -> f64 {
        if v < 0.0 {
            return -self.ceil(-v);
        }
        let q = self.quantum(v);
        let f = (v / q).floor() * q;
        if f > self.max_value() {
            self.max_value()
        } else {
            f
        }
    }

    /// Smallest grid value `>= v`; `+inf` above the range.
    pub fn ceil(&self, v: f64) -> f64 {
        if v < 0.0 {
            let r = -self.floor(-v);
            return if r == 0.0 { 0.0 } else { r };
        }
        let q = self.quantum(v);
        let c = (v / q).ceil() * q;
        if c > self.max_value() {
            f64::INFINITY
        } else {
            c
        }
    }

    pub(crate) fn floor_of<R: ExactReal>(&self, v: &R) -> f64 {
        let max = self.max_value();
        let mut c = self.floor(v.approx());
        if c == f64::NEG_INFINITY {
            if v.cmp_short(-max) == Ordering::Less {
                return c;
            }
            c = -max;
        }
        while v.cmp_short(c) == Ordering::Less {
            c = self.next_down(c);
            if c == f64::NEG_INFINITY {
                return c;
            }
        }
        while c < max {
            let n = self.next_up(c);
            if v.cmp_short(n) == Ordering::Less {
                break;
            }
            c = n;
        }
        c
    }

    pub(crate) fn ceil_of<R: ExactReal>(&self, v: &R) -> f64 {
        let max = self.max_value();
        let mut c = self.ceil(v.approx());
        if c == f64::INFINITY {
            if v.cmp_short(max) == Ordering::Greater {
                return c;
            }
            c = max;
        }
        while v.cmp_short(c) == Ordering::Greater {
            c = self.next_up(c);
            if c == f64::INFINITY {
                return c;
            }
        }
        while c > -max {
            let n = self.next_down(c);
            if v.cmp_short(n) == Ordering::Greater {
                break;
            }
            c = n;
        }
        c
    }

    /// Largest grid value `< v` (strict) or `<= v`.
    pub(crate) fn floor_bound<R: ExactReal>(&self, v: &R, strict: bool) -> f64 {
        let c = self.floor_of(v);
        if strict && c.is_finite() && v.cmp_short(c) == Ordering::Equal {
            self.next_down(c)
        } else {
            c
        }
    }

    /// Smallest grid value `> v` (strict) or `>= v`.
    pub(crate) fn ceil_bound<R: ExactReal>(&self, v: &R, strict: bool) -> f64 {
        let c = self.ceil_of(v);
        if strict && c.is_finite() && v.cmp_short(c) == Ordering::Equal {
            self.next_up(c)
        } else {
            c
        }
    }

    pub(crate) fn round_of<R: ExactReal>(&self, v: &R) -> Rounded {
        let max = self.max_value();
        let t = self.overflow_threshold();
        let f = self.floor_of(v);
        if f.is_finite() && v.cmp_short(f) == Ordering::Equal {
            return Rounded::Finite(f + 0.0);
        }
        let (lo, hi) = if f == f64::NEG_INFINITY {
            (-t, -max)
        } else if f == max {
            (max, t)
        } else {
            (f, self.next_up(f))
        };
        let mid = (lo + hi) * 0.5;
        let pick_hi = match v.cmp_short(mid) {
            Ordering::Less => false,
            Ordering::Greater => true,
            Ordering::Equal => self.is_even(hi),
        };
        let r = if pick_hi { hi } else { lo };
        if r.abs() == t {
            Rounded::Overflow { negative: r < 0.0 }
        } else {
            Rounded::Finite(r + 0.0)
        }
    }

    /// Software round-to-nearest-even of an exact two-term value.
    pub fn round_exact(&self, v: Exact) -> Rounded {
        self.round_of(&v)
    }

    /// Round-to-nearest-even of `num / den` for short operands, `den != 0`.
    pub fn round_quotient(&self, num: f64, den: f64) -> Rounded {
        self.round_of(&Ratio::new(num, den))
    }

    /// Round-to-nearest-even of `sqrt(x)` for a short `x >= 0`.
    pub fn round_sqrt(&self, x: f64) -> Rounded {
        self.round_of(&SqrtOf(x))
    }

    // IEEE operations on grid values (infinities and NaN propagate as in
    // `f64`). binary32 uses the hardware; other formats use the exact kernel.

    #[inline]
    pub fn add(&self, a: f64, b: f64) -> f64 {
        if self.is_binary32() {
            return (a as f32 + b as f32) as f64;
        }
        if !(a.is_finite() && b.is_finite()) {
            return a + b;
        }
        self.round_exact(two_sum(a, b)).to_f64()
    }

    #[inline]
    pub fn sub(&self, a: f64, b: f64) -> f64 {
        if self.is_binary32() {
            return (a as f32 - b as f32) as f64;
        }
        self.add(a, -b)
    }

    #[inline]
    pub fn mul(&self, a: f64, b: f64) -> f64 {
        if self.is_binary32() {
            return (a as f32 * b as f32) as f64;
        }
        if !(a.is_finite() && b.is_finite()) {
            return a * b;
        }
        self.round_exact(Exact::from(a * b)).to_f64()
    }

    #[inline]
    pub fn div(&self, a: f64, b: f64) -> f64 {
        if self.is_binary32() {
            return (a as f32 / b as f32) as f64;
        }
        if !(a.is_finite() && b.is_finite()) || b == 0.0 || a == 0.0 {
            return a / b;
        }
        self.round_quotient(a, b).to_f64()
    }

    #[inline]
    pub fn sqrt(&self, a: f64) -> f64 {
        if self.is_binary32() {
            return (a as f32).sqrt() as f64;
        }
        if a.is_nan() || a < 0.0 {
            return f64::NAN;
        }
        if a == 0.0 || a.is_infinite() {
            return a;
        }
        self.round_sqrt(a).to_f64()
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
