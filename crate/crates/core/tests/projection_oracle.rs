//! Projections and the 2B fixpoint against exhaustive enumeration on the
//! (4,3) format: no float solution of a constraint is ever removed.

mod common;

use common::{interval, random_interval, Table, FMT, OPS};
use fpcheck::interval::{ArithOp, FpInterval};
use fpcheck::store::{Constraint, ConstraintStore, Rel, UnaryOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Tightness {
    checked: u64,
    optimal: u64,
}

fn hull_matches(d: &FpInterval, lo: f64, hi: f64) -> bool {
    d.bounds() == Some((lo, hi))
}

fn check_ternary(t: &Table, op: ArithOp, x: FpInterval, y: FpInterval, z: FpInterval, tight: &mut Tightness) {
    let mut s = ConstraintStore::new(FMT);
    let xv = s.add_var("x", x).unwrap();
    let yv = s.add_var("y", y).unwrap();
    let zv = s.add_var("z", z).unwrap();
    s.add_constraint(Constraint::Ternary { op, z: zv, x: xv.into(), y: yv.into() }).unwrap();
    let ok = s.propagate();

    let mut hx = (f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for i in t.range(&x) {
        for j in t.range(&y) {
            let Some(r) = t.get(op, i, j) else { continue };
            if !z.contains(r) {
                continue;
            }
            let (a, b) = (t.vals[i], t.vals[j]);
            assert!(ok, "{op:?} x∈{x:?} y∈{y:?} z∈{z:?}: failed but ({a}, {b}) -> {r} is a solution");
            assert!(
                s.domain(xv).contains(a) && s.domain(yv).contains(b) && s.domain(zv).contains(r),
                "{op:?} x∈{x:?} y∈{y:?} z∈{z:?}: solution ({a}, {b}) -> {r} removed; got {:?} {:?} {:?}",
                s.domain(xv),
                s.domain(yv),
                s.domain(zv)
            );
            hx = (hx.0.min(a), hx.1.max(a));
            any = true;
        }
    }
    tight.checked += 1;
    if (!any && !ok) || (any && hull_matches(&s.domain(xv), hx.0, hx.1)) {
        tight.optimal += 1;
    }
}

#[test]
fn ternary_projections_are_sound_on_random_domains() {
    let t = Table::build();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for op in OPS {
        let mut tight = Tightness::default();
        for _ in 0..20_000 {
            let (x, y, z) = (
                random_interval(&mut rng, &t.vals),
                random_interval(&mut rng, &t.vals),
                random_interval(&mut rng, &t.vals),
            );
            check_ternary(&t, op, x, y, z, &mut tight);
        }
        println!("{op:?}: x-hull optimal in {}/{} stores", tight.optimal, tight.checked);
    }
}

#[test]
fn ternary_projections_for_every_singleton_target() {
    let t = Table::build();
    let full = FpInterval::full(FMT);
    let halves = [interval(0.0, FMT.max_value()), interval(-FMT.max_value(), 0.0), interval(-3.0, 5.0)];
    for op in OPS {
        let mut tight = Tightness::default();
        for &zv in &t.vals {
            let z = interval(zv, zv);
            check_ternary(&t, op, full, full, z, &mut tight);
            for &x in &halves {
                for &y in &halves {
                    check_ternary(&t, op, x, y, z, &mut tight);
                }
            }
        }
        println!("{op:?}: x-hull optimal in {}/{} stores", tight.optimal, tight.checked);
    }
}

#[test]
fn shared_operand_square_is_sound() {
    let t = Table::build();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20_000 {
        let x = random_interval(&mut rng, &t.vals);
        let z = random_interval(&mut rng, &t.vals);
        let mut s = ConstraintStore::new(FMT);
        let xv = s.add_var("x", x).unwrap();
        let zv = s.add_var("z", z).unwrap();
        s.add_constraint(Constraint::Ternary { op: ArithOp::Mul, z: zv, x: xv.into(), y: xv.into() }).unwrap();
        let ok = s.propagate() && s.shave(0.1);
        for i in t.range(&x) {
            if let Some(r) = t.get(ArithOp::Mul, i, i) {
                if z.contains(r) {
                    assert!(ok && s.domain(xv).contains(t.vals[i]), "x∈{x:?} z∈{z:?}: lost {}", t.vals[i]);
                }
            }
        }
    }
}

#[test]
fn unary_projections_are_sound() {
    let t = Table::build();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20_000 {
        let x = random_interval(&mut rng, &t.vals);
        let z = random_interval(&mut rng, &t.vals);
        for op in [UnaryOp::Sqrt, UnaryOp::Neg] {
            let mut s = ConstraintStore::new(FMT);
            let xv = s.add_var("x", x).unwrap();
            let zv = s.add_var("z", z).unwrap();
            s.add_constraint(Constraint::Unary { op, z: zv, x: xv.into() }).unwrap();
            let ok = s.propagate();
            for i in t.range(&x) {
                let a = t.vals[i];
                let r = match op {
                    UnaryOp::Sqrt => FMT.sqrt(a),
                    UnaryOp::Neg => -a,
                };
                if r.is_finite() && z.contains(r) {
                    assert!(
                        ok && s.domain(xv).contains(a) && s.domain(zv).contains(r),
                        "{op:?} x∈{x:?} z∈{z:?}: lost {a} -> {r}"
                    );
                }
            }
        }
    }
}

#[test]
fn comparison_projections_are_sound_and_tight() {
    let t = Table::build();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10_000 {
        let x = random_interval(&mut rng, &t.vals);
        let y = random_interval(&mut rng, &t.vals);
        for rel in [Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge, Rel::Eq, Rel::Ne] {
            let mut s = ConstraintStore::new(FMT);
            let xv = s.add_var("x", x).unwrap();
            let yv = s.add_var("y", y).unwrap();
            s.add_constraint(Constraint::Compare { rel, x: xv.into(), y: yv.into() }).unwrap();
            let ok = s.propagate();
            let mut hx = (f64::INFINITY, f64::NEG_INFINITY);
            for i in t.range(&x) {
                for j in t.range(&y) {
                    let (a, b) = (t.vals[i], t.vals[j]);
                    if rel.holds(a, b) {
                        assert!(ok && s.domain(xv).contains(a) && s.domain(yv).contains(b), "{rel:?} {x:?} {y:?}");
                        hx = (hx.0.min(a), hx.1.max(a));
                    }
                }
            }
            // Bound clipping is exact for order relations.
            if ok && rel != Rel::Ne {
                assert!(hull_matches(&s.domain(xv), hx.0, hx.1), "{rel:?} {x:?} {y:?} -> {:?}", s.domain(xv));
            }
        }
    }
}
