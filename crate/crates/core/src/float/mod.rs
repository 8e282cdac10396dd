//! Bit-exact binary floating-point formats.
//!
//! Every format handled here is a sub-format of IEEE binary32 (at most 8
//! exponent bits and 23 fraction bits), so each value is exactly an `f64`.
//! That property carries the whole exact-arithmetic substrate: sums of two
//! values are exact as an `f64` pair, and products of two values (or of a
//! value and a rounding midpoint) are exact as a single `f64`.

mod exact;
mod format;
mod rational;
mod value;

pub use exact::{two_sum, Exact};
pub(crate) use format::{ExactReal, Ratio};
pub use format::{FloatFormat, Rounded};
pub use rational::{parse_decimal, round_directed, round_nearest_even, Direction};
pub use value::{FloatClass, FloatValue};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloatError {
    #[error("no finite value beyond the {0} end of the format")]
    OverflowBoundary(&'static str),
    #[error("operation requires a finite value, got {0}")]
    Domain(FloatClass),
    #[error("unsupported format e{exponent_bits}m{mantissa_bits}: need 2..=8 exponent bits and 1..=23 fraction bits")]
    InvalidFormat { exponent_bits: u8, mantissa_bits: u8 },
    #[error("bit pattern {bits:#x} does not fit a {width}-bit format")]
    BitsOutOfRange { bits: u32, width: u32 },
    #[error("{0} is not exactly representable in the format")]
    NotRepresentable(f64),
    #[error("ordinal {0} is outside the finite range of the format")]
    OrdinalOutOfRange(i64),
    #[error("malformed decimal literal `{0}`")]
    Decimal(String),
}
