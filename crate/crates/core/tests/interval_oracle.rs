//! Forward evaluation against brute-force images on the (4,3) format.

use fpcheck::float::{round_nearest_even, FloatFormat};
use fpcheck::interval::{ArithOp, FpInterval};
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FMT: FloatFormat = FloatFormat::MINI;
const OPS: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

fn values() -> Vec<f64> {
    let n = FMT.max_magnitude_bits() as i64;
    (-n..=n).map(|k| FMT.at_ordinal(k).unwrap()).collect()
}

/// Rounded result from the exact-rational route; `None` if not finite.
fn reference(op: ArithOp, x: f64, y: f64) -> Option<f64> {
    let (rx, ry) = (BigRational::from_float(x).unwrap(), BigRational::from_float(y).unwrap());
    let exact = match op {
        ArithOp::Add => rx + ry,
        ArithOp::Sub => rx - ry,
        ArithOp::Mul => rx * ry,
        ArithOp::Div if y == 0.0 => return None,
        ArithOp::Div => rx / ry,
    };
    let r = round_nearest_even(&exact, FMT).to_f64();
    r.is_finite().then_some(r)
}

/// `results[op][i][j]` is the reference result for `vals[i] op vals[j]`.
struct Table {
    vals: Vec<f64>,
    results: Vec<Vec<Vec<Option<f64>>>>,
}

impl Table {
    fn build() -> Table {
        let vals = values();
        let results = OPS
            .iter()
            .map(|op| vals.iter().map(|&x| vals.iter().map(|&y| reference(*op, x, y)).collect()).collect())
            .collect();
        Table { vals, results }
    }

    fn index(&self, v: f64) -> usize {
        (FMT.ordinal_of(v) + FMT.max_magnitude_bits() as i64) as usize
    }

    fn range(&self, i: &FpInterval) -> std::ops::RangeInclusive<usize> {
        let (l, h) = i.bounds().unwrap();
        self.index(l)..=self.index(h)
    }
}

struct Image {
    lo: f64,
    hi: f64,
    any: bool,
    overflowed: bool,
}

fn brute_image(t: &Table, k: usize, x: &FpInterval, y: &FpInterval) -> Image {
    let op = OPS[k];
    let mut img = Image { lo: f64::INFINITY, hi: f64::NEG_INFINITY, any: false, overflowed: false };
    for i in t.range(x) {
        for j in t.range(y) {
            let y = t.vals[j];
            match t.results[k][i][j] {
                Some(r) => {
                    img.lo = img.lo.min(r);
                    img.hi = img.hi.max(r);
                    img.any = true;
                }
                None => img.overflowed |= !(op == ArithOp::Div && y == 0.0),
            }
        }
    }
    img
}

/// Checks soundness exactly and tightness except at a bound produced by
/// clipping an overflowing range.
fn check(t: &Table, k: usize, x: &FpInterval, y: &FpInterval) {
    let op = OPS[k];
    let got = FpInterval::forward_eval(op, x, y);
    let img = brute_image(t, k, x, y);
    if !img.any {
        assert!(got.is_empty(), "{op:?} {x:?} {y:?}: expected empty, got {got:?}");
        return;
    }
    let (lo, hi) = got.bounds().unwrap_or_else(|| panic!("{op:?} {x:?} {y:?}: lost the image"));
    assert!(lo <= img.lo && img.hi <= hi, "{op:?} {x:?} {y:?}: {got:?} misses [{}, {}]", img.lo, img.hi);
    let m = FMT.max_value();
    let clipped = |b: f64| img.overflowed && b.abs() == m;
    assert!(lo == img.lo || clipped(lo), "{op:?} {x:?} {y:?}: lower bound {lo} not attained ({})", img.lo);
    assert!(hi == img.hi || clipped(hi), "{op:?} {x:?} {y:?}: upper bound {hi} not attained ({})", img.hi);
}

#[test]
fn singleton_pairs_exhaustive() {
    let t = Table::build();
    for &x in &t.vals {
        for &y in &t.vals {
            let (ix, iy) = (FpInterval::from_f64(FMT, x, x).unwrap(), FpInterval::from_f64(FMT, y, y).unwrap());
            for k in 0..OPS.len() {
                check(&t, k, &ix, &iy);
            }
        }
    }
}

#[test]
fn random_interval_pairs() {
    let t = Table::build();
    let vals = &t.vals;
    let n = vals.len();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pick = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..n);
        let len = if rng.gen_bool(0.5) { rng.gen_range(0..8) } else { rng.gen_range(0..n) };
        let b = (a + len).min(n - 1);
        FpInterval::from_f64(FMT, vals[a], vals[b]).unwrap()
    };
    for _ in 0..5_000 {
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        for k in 0..OPS.len() {
            check(&t, k, &x, &y);
        }
    }
}

#[test]
fn sqrt_exhaustive_on_intervals() {
    let vals = values();
    let n = vals.len();
    for a in 0..n {
        for b in a..n {
            let x = FpInterval::from_f64(FMT, vals[a], vals[b]).unwrap();
            let got = FpInterval::forward_sqrt(&x);
            let img: Vec<f64> = vals[a..=b].iter().filter(|v| **v >= 0.0).map(|v| FMT.sqrt(*v)).collect();
            if img.is_empty() {
                assert!(got.is_empty());
                continue;
            }
            let lo = img.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = img.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(got.bounds(), Some((lo, hi)), "sqrt {x:?}");
        }
    }
}
