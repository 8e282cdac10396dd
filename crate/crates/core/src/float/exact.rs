use std::cmp::Ordering;
use std::ops::Neg;

/// An exact real held as an unevaluated sum `hi + lo` with `hi = fl(hi + lo)`.
///
/// Because `hi` is the correctly rounded value of the pair, comparisons are
/// lexicographic: `hi` decides unless the two `hi` parts tie. This is the
/// representation produced by [`two_sum`], and any `f64` is trivially one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exact {
    pub hi: f64,
    pub lo: f64,
}

/// Knuth's branch-free error-free addition. Exact barring `f64` overflow,
/// which cannot happen for operands drawn from a binary32 sub-format.
#[inline]
pub fn two_sum(a: f64, b: f64) -> Exact {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Exact { hi: s, lo: err }
}

impl Exact {
    #[inline]
    pub fn diff(a: f64, b: f64) -> Exact {
        two_sum(a, -b)
    }

    /// Halves the value. Exact as long as `lo` stays far from the `f64`
    /// subnormal range, which holds for binary32-derived quantities.
    #[inline]
    pub fn half(self) -> Exact {
        Exact { hi: self.hi * 0.5, lo: self.lo * 0.5 }
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    /// Compares against a plain `f64`.
    #[inline]
    pub fn cmp_f64(&self, f: f64) -> Ordering {
        match self.hi.partial_cmp(&f).expect("NaN in exact arithmetic") {
            Ordering::Equal => self.lo.partial_cmp(&0.0).expect("NaN in exact arithmetic"),
            o => o,
        }
    }

    /// Nearest `f64`.
    #[inline]
    pub fn approx(&self) -> f64 {
        self.hi
    }
}

impl From<f64> for Exact {
    #[inline]
    fn from(v: f64) -> Self {
        Exact { hi: v, lo: 0.0 }
    }
}

impl Neg for Exact {
    type Output = Exact;
    #[inline]
    fn neg(self) -> Exact {
        Exact { hi: -self.hi, lo: -self.lo }
    }
}

impl Eq for Exact {}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hi
            .partial_cmp(&other.hi)
            .expect("NaN in exact arithmetic")
            .then_with(|| self.lo.partial_cmp(&other.lo).expect("NaN in exact arithmetic"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, ToPrimitive};

    fn to_rational(v: f64) -> BigRational {
        BigRational::from_float(v).unwrap()
    }

    #[test]
    fn two_sum_is_exact() {
        let pairs = [(1.0, 1e-30), (3.4e38, -1e-45), (1.5, 2f64.powi(-60)), (-7.0, 7.0), (0.1, 0.2)];
        for (a, b) in pairs {
            let e = two_sum(a, b);
            assert_eq!(to_rational(e.hi) + to_rational(e.lo), to_rational(a) + to_rational(b));
        }
    }

    #[test]
    fn lexicographic_order_matches_real_order() {
        let a = two_sum(1.0, 2f64.powi(-80));
        let b = two_sum(1.0, -(2f64.powi(-80)));
        assert!(b < a);
        assert_eq!(a.cmp_f64(1.0), Ordering::Greater);
        assert_eq!(b.cmp_f64(1.0), Ordering::Less);
        let x = (to_rational(a.hi) + to_rational(a.lo)) - BigRational::from_integer(BigInt::from(1));
        assert_eq!(x.to_f64().unwrap(), 2f64.powi(-80));
    }
}
