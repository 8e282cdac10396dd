use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::{FloatError, FloatFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatClass {
    Zero,
    Subnormal,
    Normal,
    Infinite,
    Nan,
}

impl fmt::Display for FloatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FloatClass::Zero => "zero",
            FloatClass::Subnormal => "subnormal",
            FloatClass::Normal => "normal",
            FloatClass::Infinite => "infinity",
            FloatClass::Nan => "NaN",
        };
        f.write_str(s)
    }
}

/// A bit pattern of a [`FloatFormat`].
///
/// Equality and hashing identify `+0` with `-0`; everything else compares by
/// bits.
#[derive(Clone, Copy)]
pub struct FloatValue {
    bits: u32,
    format: FloatFormat,
}

impl FloatValue {
    pub fn from_bits(format: FloatFormat, bits: u32) -> Result<FloatValue, FloatError> {
        if format.width() < 32 && bits >> format.width() != 0 {
            return Err(FloatError::BitsOutOfRange { bits, width: format.width() });
        }
        Ok(FloatValue { bits, format })
    }

    pub fn from_f32(v: f32) -> FloatValue {
        FloatValue { bits: v.to_bits(), format: FloatFormat::BINARY32 }
    }

    /// `v` must be exactly a value of `format` (or an infinity / NaN).
    pub fn from_f64(format: FloatFormat, v: f64) -> Result<FloatValue, FloatError> {
        Ok(FloatValue { bits: format.encode(v)?, format })
    }

    /// Grid value known to be exact.
    pub(crate) fn from_grid(format: FloatFormat, v: f64) -> FloatValue {
        FloatValue::from_f64(format, v).expect("grid value outside its format")
    }

    pub fn zero(format: FloatFormat) -> FloatValue {
        FloatValue { bits: 0, format }
    }

    pub fn max_finite(format: FloatFormat) -> FloatValue {
        FloatValue { bits: format.max_magnitude_bits(), format }
    }

    pub fn min_finite(format: FloatFormat) -> FloatValue {
        FloatValue { bits: format.sign_mask() | format.max_magnitude_bits(), format }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn format(&self) -> FloatFormat {
        self.format
    }

    pub fn to_f64(&self) -> f64 {
        self.format.decode(self.bits)
    }

    fn magnitude(&self) -> u32 {
        self.bits & (self.format.sign_mask() - 1)
    }

    pub fn is_sign_negative(&self) -> bool {
        self.bits & self.format.sign_mask() != 0
    }

    pub fn class(&self) -> FloatClass {
        let m = self.format.mantissa_bits();
        let e = self.format.exponent_bits();
        let field = (self.bits >> m) & ((1 << e) - 1);
        let mant = self.bits & ((1 << m) - 1);
        match (field, mant) {
            (0, 0) => FloatClass::Zero,
            (0, _) => FloatClass::Subnormal,
            (f, 0) if f == (1 << e) - 1 => FloatClass::Infinite,
            (f, _) if f == (1 << e) - 1 => FloatClass::Nan,
            _ => FloatClass::Normal,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.class(), FloatClass::Infinite | FloatClass::Nan)
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude() == 0
    }

    pub fn mantissa_is_even(&self) -> bool {
        self.bits & 1 == 0
    }

    fn require_finite(&self) -> Result<(), FloatError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(FloatError::Domain(self.class()))
        }
    }

    /// Position in the numerically ordered finite values, with both zeros
    /// at 0.
    pub fn ordinal(&self) -> Result<i64, FloatError> {
        self.require_finite()?;
        let mag = self.magnitude() as i64;
        Ok(if self.is_sign_negative() { -mag } else { mag })
    }

    pub fn from_ordinal(format: FloatFormat, n: i64) -> Result<FloatValue, FloatError> {
        let max = format.max_magnitude_bits() as i64;
        if n.abs() > max {
            return Err(FloatError::OrdinalOutOfRange(n));
        }
        let bits = if n < 0 { format.sign_mask() | (-n) as u32 } else { n as u32 };
        Ok(FloatValue { bits, format })
    }

    /// Smallest finite value strictly greater than `self`.
    pub fn succ(&self) -> Result<FloatValue, FloatError> {
        let n = self.ordinal()?;
        FloatValue::from_ordinal(self.format, n + 1).map_err(|_| FloatError::OverflowBoundary("upper"))
    }

    /// Largest finite value strictly smaller than `self`.
    pub fn pred(&self) -> Result<FloatValue, FloatError> {
        let n = self.ordinal()?;
        FloatValue::from_ordinal(self.format, n - 1).map_err(|_| FloatError::OverflowBoundary("lower"))
    }

    /// Numeric comparison of finite values (zeros equal); `None` for NaN or
    /// mismatched formats.
    pub fn partial_cmp_value(&self, other: &FloatValue) -> Option<Ordering> {
        if self.format != other.format {
            return None;
        }
        self.to_f64().partial_cmp(&other.to_f64())
    }

    /// Shortest decimal that reads back to the same value.
    pub fn to_shortest_decimal(&self) -> String {
        let v = self.to_f64();
        if !v.is_finite() {
            return format!("{v}");
        }
        if self.format.is_binary32() {
            return format!("{:?}", v as f32);
        }
        for digits in 0..17 {
            let s = format!("{:.*e}", digits, v);
            if let Ok(r) = super::rational::parse_decimal(&s) {
                if let super::Rounded::Finite(back) = super::round_nearest_even(&r, self.format) {
                    if back == v {
                        return tidy_exponent(&s);
                    }
                }
            }
        }
        format!("{v:?}")
    }

    /// Reads a decimal literal (rounded to nearest, ties to even) or a
    /// `0x` bit pattern. Decimals beyond the finite range are rejected.
    pub fn parse(format: FloatFormat, text: &str) -> Result<FloatValue, FloatError> {
        let t = text.trim();
        if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            let bits = u32::from_str_radix(hex, 16).map_err(|_| FloatError::Decimal(t.to_string()))?;
            return FloatValue::from_bits(format, bits);
        }
        let r = super::rational::parse_decimal(t)?;
        match super::round_nearest_even(&r, format) {
            super::Rounded::Finite(v) => FloatValue::from_f64(format, v),
            super::Rounded::Overflow { .. } => {
                Err(FloatError::OverflowBoundary(if r < num::BigRational::default() { "lower" } else { "upper" }))
            }
        }
    }

    /// Fixed-width hexadecimal bit pattern, e.g. `0x40B08F26`.
    pub fn to_hex(&self) -> String {
        let digits = self.format.width().div_ceil(4) as usize;
        format!("0x{:0width$X}", self.bits, width = digits)
    }
}

fn tidy_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((m, "0")) => m.to_string(),
        _ => s.to_string(),
    }
}

impl PartialEq for FloatValue {
    fn eq(&self, other: &Self) -> bool {
        self.format == other.format && (self.bits == other.bits || (self.is_zero() && other.is_zero()))
    }
}

impl Eq for FloatValue {}

impl Hash for FloatValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.format.hash(state);
        if self.is_zero() {
            0u32.hash(state)
        } else {
            self.bits.hash(state)
        }
    }
}

impl fmt::Debug for FloatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.to_shortest_decimal(), self.to_hex())
    }
}

impl fmt::Display for FloatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_shortest_decimal())
    }
}
