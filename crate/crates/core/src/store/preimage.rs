use crate::float::FloatFormat;
use crate::interval::FpInterval;

/// A real interval whose endpoints are `f64` values (in practice format
/// values or midpoints between neighbours), each open or closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealInterval {
    pub lo: f64,
    pub lo_open: bool,
    pub hi: f64,
    pub hi_open: bool,
}

impl RealInterval {
    pub fn contains(&self, r: f64) -> bool {
        let above = if self.lo_open { r > self.lo } else { r >= self.lo };
        let below = if self.hi_open { r < self.hi } else { r <= self.hi };
        above && below
    }

    /// Whether 0 belongs to the interval.
    #[inline]
    pub fn has_zero(&self) -> bool {
        self.contains(0.0)
    }
}

/// Midpoint between `z` and its lower neighbour; the neighbour of the most
/// negative value is the (virtual) overflow threshold.
#[inline]
fn lower_mid(format: FloatFormat, z: f64) -> f64 {
    let m = format.max_value();
    let below = if z == -m { -2.0 * m + format.next_down(m) } else { format.next_down(z) };
    // -2m + pred(m) is -T: pred(m) = m - ulp and T = m + ulp.
    (z + below) * 0.5
}

#[inline]
fn upper_mid(format: FloatFormat, z: f64) -> f64 {
    -lower_mid(format, -z)
}

/// The reals that round to a value of `z`: `[m-(lo), m+(hi)]` with each
/// midpoint included iff the bound has an even mantissa. `z` must be non-empty.
pub fn rounding_preimage(z: &FpInterval) -> RealInterval {
    let format = z.format();
    let (lo, hi) = z.bounds().expect("preimage of the empty interval");
    RealInterval {
        lo: lower_mid(format, lo),
        lo_open: !format.is_even(lo),
        hi: upper_mid(format, hi),
        hi_open: !format.is_even(hi),
    }
}
