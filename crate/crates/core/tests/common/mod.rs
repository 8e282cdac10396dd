//! Brute-force helpers over the (4,3) format shared by the oracle tests.
#![allow(dead_code)]

use fpcheck::float::{round_nearest_even, FloatFormat};
use fpcheck::interval::{ArithOp, FpInterval};
use num::BigRational;
use rand::Rng;

pub const FMT: FloatFormat = FloatFormat::MINI;
pub const OPS: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

/// Every finite value in increasing order (one zero).
pub fn values() -> Vec<f64> {
    let n = FMT.max_magnitude_bits() as i64;
    (-n..=n).map(|k| FMT.at_ordinal(k).unwrap()).collect()
}

pub fn index_of(v: f64) -> usize {
    (FMT.ordinal_of(v) + FMT.max_magnitude_bits() as i64) as usize
}

/// Rounded result through the exact-rational route; `None` if not finite.
pub fn reference(op: ArithOp, x: f64, y: f64) -> Option<f64> {
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

/// Reference results for every operand pair, indexed by position in
/// [`values`].
pub struct Table {
    pub vals: Vec<f64>,
    results: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn build() -> Table {
        let vals = values();
        let n = vals.len();
        let mut results = Vec::new();
        for op in OPS {
            let mut t = Vec::with_capacity(n * n);
            for &x in &vals {
                for &y in &vals {
                    t.push(reference(op, x, y));
                }
            }
            results.push(t);
        }
        Table { vals, results }
    }

    #[inline]
    pub fn get(&self, op: ArithOp, i: usize, j: usize) -> Option<f64> {
        let k = OPS.iter().position(|o| *o == op).unwrap();
        self.results[k][i * self.vals.len() + j]
    }

    pub fn range(&self, d: &FpInterval) -> std::ops::RangeInclusive<usize> {
        match d.bounds() {
            Some((l, h)) => index_of(l)..=index_of(h),
            #[allow(clippy::reversed_empty_ranges)]
            None => 1..=0,
        }
    }
}

/// A random interval of the format, biased towards short ones.
pub fn random_interval<R: Rng>(rng: &mut R, vals: &[f64]) -> FpInterval {
    let n = vals.len();
    let a = rng.gen_range(0..n);
    let len = match rng.gen_range(0..3) {
        0 => 0,
        1 => rng.gen_range(0..12),
        _ => rng.gen_range(0..n),
    };
    let b = (a + len).min(n - 1);
    FpInterval::from_f64(FMT, vals[a], vals[b]).unwrap()
}

pub fn interval(lo: f64, hi: f64) -> FpInterval {
    FpInterval::from_f64(FMT, lo, hi).unwrap()
}

/// Literal spelling of a format value that parses back to it.
pub fn lit(v: f64) -> String {
    fpcheck::float::FloatValue::from_f64(FMT, v).unwrap().to_shortest_decimal()
}

/// Shape limits for [`random_program`].
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_inputs: usize,
    pub max_ops: usize,
    /// Widest input domain, in values.
    pub max_width: usize,
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    vals: &'a [f64],
    ops: usize,
    temps: usize,
    suspect_placed: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn atom(&mut self, defined: &[String]) -> String {
        if defined.is_empty() || self.rng.gen_bool(0.2) {
            let v = self.vals[self.rng.gen_range(0..self.vals.len())];
            if v < 0.0 {
                format!("({})", lit(v))
            } else {
                lit(v)
            }
        } else {
            defined[self.rng.gen_range(0..defined.len())].clone()
        }
    }

    fn expr(&mut self, defined: &[String]) -> String {
        let a = self.atom(defined);
        match self.rng.gen_range(0..10) {
            0 => format!("sqrt({a})"),
            1 => format!("-{a}"),
            k => {
                let op = ["+", "-", "*", "/"][k % 4];
                format!("{a} {op} {}", self.atom(defined))
            }
        }
    }

    fn suspect(&mut self, defined: &[String], inputs: usize, out: &mut String, indent: &str) {
        let locals = &defined[inputs.min(defined.len())..];
        let var = if !locals.is_empty() && self.rng.gen_bool(0.8) {
            locals[locals.len() - 1 - self.rng.gen_range(0..locals.len().min(2))].clone()
        } else {
            defined[self.rng.gen_range(0..defined.len())].clone()
        };
        let n = self.vals.len();
        let a = self.rng.gen_range(0..n);
        let b = (a + self.rng.gen_range(0..n / 3)).min(n - 1);
        let (open_lo, open_hi) = (self.rng.gen_bool(0.2) && b > a + 1, self.rng.gen_bool(0.2) && b > a + 1);
        out.push_str(&format!(
            "{indent}@suspect {var} in {}{}, {}{};\n",
            if open_lo { '(' } else { '[' },
            lit(self.vals[a]),
            lit(self.vals[b]),
            if open_hi { ')' } else { ']' }
        ));
        self.suspect_placed = true;
    }

    fn block(&mut self, defined: &mut Vec<String>, inputs: usize, depth: usize, out: &mut String) {
        let indent = "  ".repeat(depth);
        while self.ops > 0 && self.rng.gen_bool(0.85) {
            if depth < 2 && self.rng.gen_bool(0.25) {
                let rel = ["<", "<=", ">", ">=", "==", "!="][self.rng.gen_range(0..6)];
                let (l, r) = (self.atom(defined), self.atom(defined));
                out.push_str(&format!("{indent}if ({l} {rel} {r}) {{\n"));
                let mut then_defs = defined.clone();
                self.block(&mut then_defs, inputs, depth + 1, out);
                if !self.suspect_placed && self.rng.gen_bool(0.15) {
                    self.suspect(&then_defs, inputs, out, &format!("{indent}  "));
                }
                out.push_str(&format!("{indent}}} else {{\n"));
                let mut else_defs = defined.clone();
                self.block(&mut else_defs, inputs, depth + 1, out);
                out.push_str(&format!("{indent}}}\n"));
                for v in then_defs {
                    if else_defs.contains(&v) && !defined.contains(&v) {
                        defined.push(v);
                    }
                }
                continue;
            }
            self.ops -= 1;
            let e = self.expr(defined);
            let reuse = defined.len() > inputs && self.rng.gen_bool(0.3);
            let target = if reuse {
                defined[self.rng.gen_range(inputs..defined.len())].clone()
            } else {
                self.temps += 1;
                format!("t{}", self.temps)
            };
            out.push_str(&format!("{indent}{target} = {e};\n"));
            if !defined.contains(&target) {
                defined.push(target);
            }
        }
    }
}

/// Random loop-free program over the (4,3) format with one annotation.
pub fn random_program<R: Rng>(rng: &mut R, shape: Shape) -> String {
    let vals = values();
    let n = vals.len();
    let inputs = rng.gen_range(1..=shape.max_inputs);
    let mut out = String::new();
    let mut defined = Vec::new();
    for i in 0..inputs {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(0..shape.max_width)).min(n - 1);
        out.push_str(&format!("input x{i} in [{}, {}];\n", lit(vals[a]), lit(vals[b])));
        defined.push(format!("x{i}"));
    }
    let ops = rng.gen_range(1..=shape.max_ops.max(1));
    let mut g = Gen { rng, vals: &vals, ops, temps: 0, suspect_placed: false };
    g.block(&mut defined, inputs, 0, &mut out);
    if !g.suspect_placed {
        g.suspect(&defined, inputs, &mut out, "");
    }
    out
}

/// Every input tuple of `p`, in odometer order.
pub fn all_points(p: &fpcheck::frontend::Program) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for d in &p.inputs {
        let (lo, hi) = d.interval.domain.bounds().unwrap();
        let vals: Vec<f64> = (FMT.ordinal_of(lo)..=FMT.ordinal_of(hi)).map(|k| FMT.at_ordinal(k).unwrap()).collect();
        points = points
            .into_iter()
            .flat_map(|pt| {
                vals.iter().map(move |&v| {
                    let mut q = pt.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

/// Solves annotation 0 of `src` with `strategy` and compares against
/// running every input tuple. Returns a description of any disagreement.
pub fn check_against_enumeration(src: &str, strategy: fpcheck::search::Strategy) -> Result<bool, String> {
    use fpcheck::frontend::{parse_program, Compiled};
    use fpcheck::pipeline::{solve_program, Status};
    use fpcheck::search::SolverConfig;

    let p = parse_program(src, FMT).map_err(|e| format!("parse: {e}\n{src}"))?;
    let compiled = Compiled::new(&p);
    let reachable = all_points(&p).iter().any(|pt| compiled.hits(pt, 0));
    let cfg = SolverConfig { strategy, ..SolverConfig::default() };
    let r = solve_program(&p, 0, &cfg).map_err(|e| format!("{strategy}: {e}\n{src}"))?;
    let ok = match &r.status {
        Status::Sat(w) => {
            let pt: Vec<f64> = w.iter().map(|(_, v)| v.to_f64()).collect();
            reachable && r.verified && compiled.hits(&pt, 0)
        }
        Status::Unsat => !reachable && strategy.is_complete(),
        Status::NotFound => !strategy.is_complete(),
        Status::Unknown(_) => false,
    };
    if ok {
        Ok(reachable)
    } else {
        Err(format!("{strategy}: {} but enumeration says reachable = {reachable}\n{src}", r.status.name()))
    }
}

/// Like [`random_program`], but half of the time the annotation interval is
/// moved to a few values around what a random run computes, so that both
/// answers are common.
pub fn aimed_program<R: Rng>(rng: &mut R, shape: Shape) -> String {
    use fpcheck::frontend::{parse_program, Compiled};
    let src = random_program(rng, shape);
    if rng.gen_bool(0.5) {
        return src;
    }
    let p = parse_program(&src, FMT).unwrap();
    let pt: Vec<f64> = p
        .inputs
        .iter()
        .map(|d| {
            let (lo, hi) = d.interval.domain.bounds().unwrap();
            FMT.at_ordinal(rng.gen_range(FMT.ordinal_of(lo)..=FMT.ordinal_of(hi))).unwrap()
        })
        .collect();
    let trace = Compiled::new(&p).run(&pt, false);
    let Some(v) = trace.suspects.first().map(|s| s.value).filter(|v| v.is_finite()) else { return src };
    let k = FMT.ordinal_of(v);
    let max = FMT.max_magnitude_bits() as i64;
    let lo = FMT.at_ordinal((k - rng.gen_range(0..3)).max(-max)).unwrap();
    let hi = FMT.at_ordinal((k + rng.gen_range(0..3)).min(max)).unwrap();
    // Sometimes exclude the value that was seen.
    let (lo, hi) = if rng.gen_bool(0.3) && k < max {
        let next = FMT.at_ordinal(k + 1).unwrap();
        (next, hi.max(next))
    } else {
        (lo, hi)
    };
    src.lines()
        .map(|l| match (l.contains("@suspect"), l.find(" in ")) {
            (true, Some(at)) => format!("{} in [{}, {}];", &l[..at], lit(lo), lit(hi)),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
