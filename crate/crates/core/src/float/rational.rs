//! Rounding of arbitrary exact rationals, independent of the `f64` kernel.
//!
//! This is the slow reference route: decimal literals go through it, and the
//! tests use it as the oracle for the fast kernel in `format.rs`.

use std::cmp::Ordering;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::{FloatError, FloatFormat, Rounded};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// Parses `[+-]digits[.digits][(e|E)[+-]digits][f|F]` exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational, FloatError> {
    let bad = || FloatError::Decimal(text.to_string());
    let s = text.trim();
    let s = s.strip_suffix(['f', 'F']).unwrap_or(s);
    let (negative, s) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.abs() > 10_000 {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

fn pow2_rational(k: i32) -> BigRational {
    let two = BigInt::from(2);
    if k >= 0 {
        BigRational::from_integer(num::pow(two, k as usize))
    } else {
        BigRational::new(BigInt::one(), num::pow(two, (-k) as usize))
    }
}

/// For `a > 0`, writes `a = (n + frac) * 2^q` where `q` is the grid exponent
/// of the binade holding `a` and `0 <= frac < 1`.
fn split_on_grid(a: &BigRational, format: FloatFormat) -> (BigInt, BigRational, i32) {
    let bits = |x: &BigInt| x.bits() as i32;
    let mut e = bits(a.numer()) - bits(a.denom());
    if *a < pow2_rational(e) {
        e -= 1;
    }
    debug_assert!(*a >= pow2_rational(e) && *a < pow2_rational(e + 1));
    let q = e.max(format.emin()) - format.mantissa_bits() as i32;
    let scaled = a * pow2_rational(-q);
    let n = scaled.floor().to_integer();
    let frac = scaled - BigRational::from_integer(n.clone());
    (n, frac, q)
}

fn grid_value(n: &BigInt, q: i32) -> f64 {
    n.to_f64().expect("grid integer fits f64") * 2f64.powi(q)
}

/// Round-to-nearest, ties-to-even of an exact rational.
pub fn round_nearest_even(r: &BigRational, format: FloatFormat) -> Rounded {
    if r.is_zero() {
        return Rounded::Finite(0.0);
    }
    let negative = r.is_negative();
    let (mut n, frac, q) = split_on_grid(&r.abs(), format);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let up = match frac.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => n.sign() != Sign::NoSign && n.bit(0),
    };
    if up {
        n += 1;
    }
    let v = grid_value(&n, q);
    if v > format.max_value() {
        return Rounded::Overflow { negative };
    }
    Rounded::Finite(if negative { -v } else { v + 0.0 })
}

/// Directed rounding onto the finite grid: `Down` gives the largest value
/// `<= r` (`< r` when `strict`), `Up` the smallest value `>= r` (`> r`).
/// Returns `None` when no finite value qualifies.
pub fn round_directed(r: &BigRational, format: FloatFormat, direction: Direction, strict: bool) -> Option<f64> {
    let max = format.max_value();
    let v = if r.is_zero() {
        match (direction, strict) {
            (_, false) => 0.0,
            (Direction::Down, true) => -format.min_positive(),
            (Direction::Up, true) => format.min_positive(),
        }
    } else {
        let (n, frac, q) = split_on_grid(&r.abs(), format);
        let exact = frac.is_zero();
        let floor_abs = grid_value(&n, q);
        let ceil_abs = if exact { floor_abs } else { grid_value(&(n + 1), q) };
        // Round the magnitude the opposite way for negative inputs.
        let toward_zero = (direction == Direction::Down) != r.is_negative();
        let mag = if toward_zero { floor_abs } else { ceil_abs };
        let v = if r.is_negative() { -mag } else { mag };
        if strict && exact {
            match direction {
                Direction::Down => format.next_down(v.clamp(-max, max)),
                Direction::Up => format.next_up(v.clamp(-max, max)),
            }
        } else {
            v
        }
    };
    match direction {
        Direction::Down if v < -max => None,
        Direction::Down => Some(v.min(max)),
        Direction::Up if v > max => None,
        Direction::Up => Some(v.max(-max)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(dec("0.1"), BigRational::new(1.into(), 10.into()));
        assert_eq!(dec("-1e-5"), BigRational::new((-1).into(), 100000.into()));
        assert_eq!(dec("2.0f"), BigRational::from_integer(2.into()));
        assert_eq!(dec(".5"), BigRational::new(1.into(), 2.into()));
        assert_eq!(dec("1262.21"), BigRational::new(126221.into(), 100.into()));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("e5").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn one_tenth_binary32() {
        let r = round_nearest_even(&dec("0.1"), FloatFormat::BINARY32);
        assert_eq!(r, Rounded::Finite(0.1f32 as f64));
        assert_eq!((0.1f32).to_bits(), 0x3DCC_CCCD);
        // Independent check: 0.1 lies strictly between the two neighbours and
        // is closer to the chosen one.
        let chosen = BigRational::from_float(0.1f32 as f64).unwrap();
        let below = BigRational::from_float(f32::from_bits(0x3DCC_CCCC) as f64).unwrap();
        let x = dec("0.1");
        assert!(below < x && x < chosen);
        assert!(&chosen - &x < &x - &below);
    }

    #[test]
    fn tie_to_even() {
        let one_plus_half_ulp = BigRational::from_float(1.0 + 2f64.powi(-24)).unwrap();
        assert_eq!(round_nearest_even(&one_plus_half_ulp, FloatFormat::BINARY32), Rounded::Finite(1.0));
    }

    #[test]
    fn directed_rounding_of_endpoints() {
        let f = FloatFormat::BINARY32;
        let neg = dec("-1e-5");
        let down_strict = round_directed(&neg, f, Direction::Down, true).unwrap();
        assert_eq!(down_strict as f32, -1.0000001e-5f32);
        let up = round_directed(&dec("156.25001"), f, Direction::Up, true).unwrap();
        assert!(up > 156.25001 && f.next_down(up) <= 156.25001);
        let exact = round_directed(&dec("2"), f, Direction::Down, true).unwrap();
        assert_eq!(exact, f.next_down(2.0));
        assert_eq!(round_directed(&dec("1e39"), f, Direction::Up, false), None);
        assert_eq!(round_directed(&dec("1e39"), f, Direction::Down, false), Some(f.max_value()));
        assert_eq!(round_directed(&dec("0"), f, Direction::Up, true), Some(f.min_positive()));
    }

    #[test]
    fn agrees_with_std_parse_on_binary32() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let mant: u64 = rng.gen_range(0..10_000_000_000);
            let exp: i32 = rng.gen_range(-50..40);
            let s = format!("{mant}e{exp}");
            let ours = round_nearest_even(&dec(&s), FloatFormat::BINARY32).to_f64();
            let std: f32 = s.parse().unwrap();
            assert_eq!(ours, std as f64, "{s}");
        }
    }
}
