//! Branch-and-prune search over the input variables of a constraint store.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::float::{Exact, FloatFormat, FloatValue};
use crate::interval::FpInterval;
use crate::store::{Constraint, ConstraintStore, Term, UnaryOp, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Bisection.
    Std,
    /// Five pieces: both bounds and the midpoint as singletons, plus the two
    /// open gaps between them.
    Fpc,
    /// Only the three singletons of `Fpc`; incomplete.
    Fp3s,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Std, Strategy::Fpc, Strategy::Fp3s];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Std => "std",
            Strategy::Fpc => "fpc",
            Strategy::Fp3s => "fp3s",
        }
    }

    /// Whether exhausting the search proves that no solution exists.
    pub fn is_complete(&self) -> bool {
        !matches!(self, Strategy::Fp3s)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        match s {
            "std" => Ok(Strategy::Std),
            "fpc" => Ok(Strategy::Fpc),
            "fp3s" | "fpc3s" => Ok(Strategy::Fp3s),
            _ => Err(format!("unknown strategy `{s}` (expected std, fpc or fp3s)")),
        }
    }
}

/// When 3B shaving runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShaveMode {
    Off,
    /// Once, before the first split.
    Root,
    /// At every search node.
    Nodes,
}

impl FromStr for ShaveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<ShaveMode, String> {
        match s {
            "off" => Ok(ShaveMode::Off),
            "root" => Ok(ShaveMode::Root),
            "nodes" => Ok(ShaveMode::Nodes),
            _ => Err(format!("unknown shave mode `{s}` (expected root, nodes or off)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Copies of each loop body kept by unrolling.
    pub unroll_k: u32,
    pub timeout: Duration,
    pub node_limit: Option<u64>,
    pub shave: ShaveMode,
    /// Fraction of a domain tried per 3B slice.
    pub slice_fraction: f64,
    /// Bisect at the ordinal midpoint instead of the arithmetic one (`Std`).
    pub ordinal_midpoint: bool,
    /// Reserved for randomized tie-breaks; the search is deterministic.
    pub seed: u64,
    /// Parallel search workers; 1 keeps node counts reproducible.
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            strategy: Strategy::Fpc,
            unroll_k: 10,
            timeout: Duration::from_secs(180),
            node_limit: None,
            shave: ShaveMode::Root,
            slice_fraction: 0.1,
            ordinal_midpoint: false,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub nodes: u64,
    pub propagations: u64,
    pub max_depth: u32,
    pub time_ms: f64,
}

impl Stats {
    pub fn absorb(&mut self, other: &Stats) {
        self.nodes += other.nodes;
        self.propagations += other.propagations;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.time_ms += other.time_ms;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// A solution; input values in the order the inputs were given.
    Found(Vec<FloatValue>),
    /// The search space was exhausted without a solution.
    Exhausted,
    /// Time or node limit.
    LimitHit(String),
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("variable `{0}` is neither an input nor defined by an earlier constraint")]
    NotFunctional(String),
    #[error("soundness violation: {0}")]
    Soundness(String),
}

/// Decides whether a point of the input space is a real solution, e.g. by
/// running the program it came from.
pub trait LeafOracle: Sync {
    fn accepts(&self, inputs: &[f64]) -> bool;
}

/// The input variable with the widest domain, ties going to the smallest
/// name. `None` when every input is a singleton.
pub fn select_variable(store: &ConstraintStore, inputs: &[VarId]) -> Option<VarId> {
    let mut best: Option<(VarId, Exact)> = None;
    for &v in inputs {
        let d = store.domain(v);
        if d.count() < 2 {
            continue;
        }
        let w = d.width();
        let better = match &best {
            None => true,
            Some((b, bw)) => match cmp_exact(&w, bw) {
                Ordering::Greater => true,
                Ordering::Equal => store.name(v) < store.name(*b),
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((v, w));
        }
    }
    best.map(|b| b.0)
}

fn cmp_exact(a: &Exact, b: &Exact) -> Ordering {
    a.hi.partial_cmp(&b.hi).expect("finite widths").then(a.lo.partial_cmp(&b.lo).expect("finite widths"))
}

/// The split point of `x` (at least two values): the rounded arithmetic
/// midpoint, or the ordinal one if that lands on a bound.
pub fn midpoint(x: &FpInterval, ordinal: bool) -> f64 {
    let f = x.format();
    let (lo, hi) = x.bounds().expect("non-empty interval");
    let ordinal_mid = || {
        let (a, b) = (f.ordinal_of(lo), f.ordinal_of(hi));
        f.at_ordinal((a + b).div_euclid(2)).expect("between two ordinals")
    };
    if ordinal {
        return ordinal_mid();
    }
    let m = f.round_exact(crate::float::two_sum(lo, hi).half()).to_f64();
    if m == lo || m == hi {
        ordinal_mid()
    } else {
        m
    }
}

/// Splits a domain of at least two values into the pieces explored, in
/// order. `Std` and `Fpc` pieces partition `x`; `Fp3s` keeps only the three
/// singletons.
pub fn split(x: &FpInterval, strategy: Strategy, ordinal_midpoint: bool) -> Vec<FpInterval> {
    assert!(x.count() >= 2, "split needs at least two values");
    let f = x.format();
    let (l, r) = x.bounds().expect("non-empty interval");
    let iv = |a: f64, b: f64| FpInterval::from_grid(f, a, b);
    if x.count() == 2 {
        return vec![iv(l, l), iv(r, r)];
    }
    let m = midpoint(x, ordinal_midpoint && strategy == Strategy::Std);
    match strategy {
        Strategy::Std => vec![iv(l, m), iv(f.next_up(m), r)],
        // Singletons before the open pieces: boundary values are cheap to
        // test and often hit.
        Strategy::Fpc => {
            [iv(l, l), iv(m, m), iv(r, r), iv(f.next_up(l), f.next_down(m)), iv(f.next_up(m), f.next_down(r))]
                .into_iter()
                .filter(|p| !p.is_empty())
                .collect()
        }
        Strategy::Fp3s => vec![iv(l, l), iv(m, m), iv(r, r)],
    }
}

/// Values of every variable when the inputs take `point`, computed by
/// running the defining constraints in order. `None` for a variable that is
/// not reached (never happens for a functional store).
pub fn replay(store: &ConstraintStore, inputs: &[VarId], point: &[f64]) -> Vec<Option<f64>> {
    let f = store.format();
    let mut vals: Vec<Option<f64>> = vec![None; store.num_vars()];
    for (v, x) in inputs.iter().zip(point) {
        vals[v.index()] = Some(*x);
    }
    let get = |vals: &[Option<f64>], t: &Term| match t {
        Term::Var(v) => vals[v.index()],
        Term::Const(c) => Some(c.to_f64()),
    };
    for c in store.constraints() {
        match c {
            Constraint::Ternary { op, z, x, y } => {
                if let (Some(a), Some(b)) = (get(&vals, x), get(&vals, y)) {
                    vals[z.index()] = Some(op.apply(f, a, b));
                }
            }
            Constraint::Unary { op, z, x } => {
                if let Some(a) = get(&vals, x) {
                    vals[z.index()] = Some(match op {
                        UnaryOp::Sqrt => f.sqrt(a),
                        UnaryOp::Neg => -a,
                    });
                }
            }
            Constraint::Assign { z, x } => vals[z.index()] = get(&vals, x),
            Constraint::Compare { .. } => {}
        }
    }
    vals
}

/// Whether replaying `point` satisfies every constraint of `root` with every
/// value finite and inside its domain there.
fn is_solution(root: &ConstraintStore, vals: &[Option<f64>]) -> bool {
    let get = |t: &Term| match t {
        Term::Var(v) => vals[v.index()],
        Term::Const(c) => Some(c.to_f64()),
    };
    let in_domains = root.vars().all(|v| vals[v.index()].is_some_and(|x| x.is_finite() && root.domain(v).contains(x)));
    in_domains
        && root.constraints().iter().all(|c| match c {
            Constraint::Compare { rel, x, y } => rel.holds(get(x).unwrap_or(f64::NAN), get(y).unwrap_or(f64::NAN)),
            _ => true,
        })
}

fn check_functional(store: &ConstraintStore, inputs: &[VarId]) -> Result<(), SearchError> {
    let mut defined = vec![false; store.num_vars()];
    for v in inputs {
        defined[v.index()] = true;
    }
    let known = |defined: &[bool], t: &Term| t.var().is_none_or(|v| defined[v.index()]);
    for c in store.constraints() {
        let (z, operands) = match c {
            Constraint::Ternary { z, x, y, .. } => (Some(*z), vec![*x, *y]),
            Constraint::Unary { z, x, .. } | Constraint::Assign { z, x } => (Some(*z), vec![*x]),
            Constraint::Compare { x, y, .. } => (None, vec![*x, *y]),
        };
        for t in &operands {
            if !known(&defined, t) {
                return Err(SearchError::NotFunctional(store.name(t.var().unwrap()).to_string()));
            }
        }
        if let Some(z) = z {
            if defined[z.index()] {
                return Err(SearchError::NotFunctional(store.name(z).to_string()));
            }
            defined[z.index()] = true;
        }
    }
    match store.vars().find(|v| !defined[v.index()]) {
        Some(v) => Err(SearchError::NotFunctional(store.name(v).to_string())),
        None => Ok(()),
    }
}

struct Search<'a> {
    root: &'a ConstraintStore,
    inputs: &'a [VarId],
    oracle: Option<&'a dyn LeafOracle>,
    cfg: &'a SolverConfig,
    deadline: Instant,
}

enum Step {
    Pruned,
    Leaf(Option<Vec<FloatValue>>),
    Children(Vec<ConstraintStore>),
}

impl Search<'_> {
    /// Filters one node and either decides it or splits it.
    fn expand(&self, mut s: ConstraintStore, depth: u32, propagations: &mut u64) -> Result<Step, SearchError> {
        let ok =
            s.propagate() && (self.cfg.shave != ShaveMode::Nodes || depth == 0 || s.shave(self.cfg.slice_fraction));
        *propagations += s.take_propagations();
        if !ok {
            return Ok(Step::Pruned);
        }
        match select_variable(&s, self.inputs) {
            None => self.leaf(&s).map(Step::Leaf),
            Some(v) => Ok(Step::Children(
                split(&s.domain(v), self.cfg.strategy, self.cfg.ordinal_midpoint)
                    .into_iter()
                    .filter_map(|piece| {
                        let mut c = s.clone();
                        c.restrict(v, &piece).then_some(c)
                    })
                    .collect(),
            )),
        }
    }

    fn leaf(&self, s: &ConstraintStore) -> Result<Option<Vec<FloatValue>>, SearchError> {
        let f = s.format();
        let point: Vec<f64> = self.inputs.iter().map(|v| s.domain(*v).bounds().expect("non-empty").0).collect();
        let vals = replay(self.root, self.inputs, &point);
        let solution = is_solution(self.root, &vals);
        if solution {
            // Propagation must never have removed a value of a solution.
            for v in s.vars() {
                let x = vals[v.index()].expect("solutions define every variable");
                if !s.domain(v).contains(x) {
                    return Err(SearchError::Soundness(format!(
                        "{} = {x} is part of a solution but was pruned to {}",
                        s.name(v),
                        s.domain(v)
                    )));
                }
            }
        }
        let accepted = match self.oracle {
            Some(o) => {
                let a = o.accepts(&point);
                if solution && !a {
                    return Err(SearchError::Soundness(format!(
                        "inputs {point:?} satisfy the path constraints but the program does not reach the target"
                    )));
                }
                a
            }
            None => solution,
        };
        Ok(accepted.then(|| point.iter().map(|x| value(f, *x)).collect()))
    }

    fn limit(&self, nodes: u64) -> Option<String> {
        if Instant::now() >= self.deadline {
            return Some(format!("timeout after {:.1} s", self.cfg.timeout.as_secs_f64()));
        }
        match self.cfg.node_limit {
            Some(n) if nodes >= n => Some(format!("node limit {n} reached")),
            _ => None,
        }
    }

    fn run_sequential(&self, root: ConstraintStore, stats: &mut Stats) -> Result<Outcome, SearchError> {
        let mut stack = vec![(root, 0u32)];
        while let Some((s, depth)) = stack.pop() {
            if let Some(reason) = self.limit(stats.nodes) {
                return Ok(Outcome::LimitHit(reason));
            }
            stats.nodes += 1;
            stats.max_depth = stats.max_depth.max(depth);
            match self.expand(s, depth, &mut stats.propagations)? {
                Step::Pruned | Step::Leaf(None) => {}
                Step::Leaf(Some(w)) => return Ok(Outcome::Found(w)),
                Step::Children(children) => stack.extend(children.into_iter().rev().map(|c| (c, depth + 1))),
            }
        }
        Ok(Outcome::Exhausted)
    }

    fn run_parallel(&self, root: ConstraintStore, stats: &mut Stats) -> Result<Outcome, SearchError> {
        struct Shared {
            stack: Vec<(ConstraintStore, u32)>,
            busy: usize,
            done: Option<Result<Outcome, SearchError>>,
        }
        let shared = Mutex::new(Shared { stack: vec![(root, 0)], busy: 0, done: None });
        let wake = Condvar::new();
        let stop = AtomicBool::new(false);
        let nodes = AtomicU64::new(0);
        let propagations = AtomicU64::new(0);
        let max_depth = AtomicU64::new(0);
        let finish = |g: &mut Shared, r: Result<Outcome, SearchError>| {
            if g.done.is_none() {
                g.done = Some(r);
            }
            stop.store(true, AtomicOrdering::SeqCst);
        };
        std::thread::scope(|scope| {
            for _ in 0..self.cfg.workers {
                scope.spawn(|| loop {
                    let (s, depth) = {
                        let mut g = shared.lock().expect("search lock");
                        loop {
                            if stop.load(AtomicOrdering::SeqCst) {
                                wake.notify_all();
                                return;
                            }
                            if let Some(item) = g.stack.pop() {
                                g.busy += 1;
                                break item;
                            }
                            if g.busy == 0 {
                                finish(&mut g, Ok(Outcome::Exhausted));
                                wake.notify_all();
                                return;
                            }
                            g = wake.wait(g).expect("search lock");
                        }
                    };
                    let n = nodes.fetch_add(1, AtomicOrdering::SeqCst);
                    max_depth.fetch_max(depth as u64, AtomicOrdering::SeqCst);
                    let step = match self.limit(n) {
                        Some(reason) => Err(Ok(Outcome::LimitHit(reason))),
                        None => {
                            let mut p = 0;
                            let r = self.expand(s, depth, &mut p);
                            propagations.fetch_add(p, AtomicOrdering::SeqCst);
                            r.map_err(Err)
                        }
                    };
                    let mut g = shared.lock().expect("search lock");
                    g.busy -= 1;
                    match step {
                        Err(r) => finish(&mut g, r),
                        Ok(Step::Leaf(Some(w))) => finish(&mut g, Ok(Outcome::Found(w))),
                        Ok(Step::Children(children)) => {
                            g.stack.extend(children.into_iter().rev().map(|c| (c, depth + 1)))
                        }
                        Ok(_) => {}
                    }
                    wake.notify_all();
                });
            }
        });
        stats.nodes += nodes.into_inner();
        stats.propagations += propagations.into_inner();
        stats.max_depth = stats.max_depth.max(max_depth.into_inner() as u32);
        shared.into_inner().expect("search lock").done.unwrap_or(Ok(Outcome::Exhausted))
    }
}

fn value(f: FloatFormat, x: f64) -> FloatValue {
    FloatValue::from_f64(f, x).expect("domain bounds are format values")
}

/// Searches the inputs of `store` for a point accepted by `oracle` (or, with
/// no oracle, for a solution of the constraints).
///
/// Every variable other than the inputs must be defined by exactly one
/// constraint from earlier ones, as path systems are.
pub fn solve(
    store: &ConstraintStore,
    inputs: &[VarId],
    oracle: Option<&dyn LeafOracle>,
    cfg: &SolverConfig,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    check_functional(store, inputs)?;
    let search = Search { root: store, inputs, oracle, cfg, deadline: start + cfg.timeout };
    let mut stats = Stats::default();
    let mut root = store.clone();
    root.take_propagations();
    let ok = root.propagate() && (cfg.shave == ShaveMode::Off || root.shave(cfg.slice_fraction));
    stats.propagations += root.take_propagations();
    let outcome = if !ok {
        stats.nodes = 1;
        Outcome::Exhausted
    } else if cfg.workers > 1 {
        search.run_parallel(root, &mut stats)?
    } else {
        search.run_sequential(root, &mut stats)?
    };
    stats.time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(SearchResult { outcome, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B32: FloatFormat = FloatFormat::BINARY32;

    fn iv(a: f64, b: f64) -> FpInterval {
        FpInterval::from_f64(B32, a, b).unwrap()
    }

    #[test]
    fn widest_input_wins_and_ties_go_by_name() {
        let mut s = ConstraintStore::new(B32);
        let c = s.add_var("c", iv(0.0, 5.0)).unwrap();
        let b = s.add_var("b", iv(0.0, 5.0)).unwrap();
        let a = s.add_var("a", iv(5.0, 10.0)).unwrap();
        assert_eq!(select_variable(&s, &[c, b, a]), Some(a));
        assert_eq!(select_variable(&s, &[c, b]), Some(b));
        let mut t = ConstraintStore::new(B32);
        let x = t.add_var("x", iv(1.0, 1.0)).unwrap();
        assert_eq!(select_variable(&t, &[x]), None);
    }

    #[test]
    fn split_shapes() {
        assert_eq!(split(&iv(0.0, 8.0), Strategy::Std, false), [iv(0.0, 4.0), iv(B32.next_up(4.0), 8.0)]);
        let two = iv(1.0, B32.next_up(1.0));
        assert_eq!(split(&two, Strategy::Fpc, false), [iv(1.0, 1.0), iv(B32.next_up(1.0), B32.next_up(1.0))]);
        let p = split(&iv(0.0, 8.0), Strategy::Fpc, false);
        assert_eq!(p.len(), 5);
        assert_eq!(p[..3], [iv(0.0, 0.0), iv(4.0, 4.0), iv(8.0, 8.0)]);
        let q = split(&iv(0.0, 8.0), Strategy::Fp3s, false);
        assert_eq!(q, [iv(0.0, 0.0), iv(4.0, 4.0), iv(8.0, 8.0)]);
        // three values: the middle one is the midpoint, gaps vanish
        let three = iv(1.0, B32.next_up(B32.next_up(1.0)));
        assert_eq!(split(&three, Strategy::Fpc, false).len(), 3);
    }

    #[test]
    fn finds_and_refutes_a_square_root() {
        let mut s = ConstraintStore::new(B32);
        let x = s.add_var("x", iv(0.0, 100.0)).unwrap();
        let z = s.add_var("z", iv(3.0, 3.0)).unwrap();
        s.add_constraint(Constraint::Ternary { op: crate::interval::ArithOp::Mul, z, x: x.into(), y: x.into() })
            .unwrap();
        let cfg = SolverConfig::default();
        let r = solve(&s, &[x], None, &cfg).unwrap();
        let Outcome::Found(w) = r.outcome else { panic!("{:?}", r.outcome) };
        assert_eq!(B32.mul(w[0].to_f64(), w[0].to_f64()), 3.0);

        // no binary32 squares to exactly 2 or 7
        for (target, strategy) in [(2.0, Strategy::Std), (7.0, Strategy::Fpc)] {
            let mut t = ConstraintStore::new(B32);
            let x = t.add_var("x", iv(0.0, 100.0)).unwrap();
            let z = t.add_var("z", iv(target, target)).unwrap();
            t.add_constraint(Constraint::Ternary { op: crate::interval::ArithOp::Mul, z, x: x.into(), y: x.into() })
                .unwrap();
            let cfg = SolverConfig { strategy, ..SolverConfig::default() };
            let r = solve(&t, &[x], None, &cfg).unwrap();
            assert_eq!(r.outcome, Outcome::Exhausted, "{strategy}");
        }
    }

    #[test]
    fn non_functional_store_is_rejected() {
        let mut s = ConstraintStore::new(B32);
        let x = s.add_var("x", iv(0.0, 1.0)).unwrap();
        s.add_var("free", iv(0.0, 1.0)).unwrap();
        assert_eq!(
            solve(&s, &[x], None, &SolverConfig::default()).unwrap_err(),
            SearchError::NotFunctional("free".into())
        );
    }

    #[test]
    fn node_limit_gives_up() {
        let mut s = ConstraintStore::new(B32);
        let x = s.add_var("x", iv(0.0, 100.0)).unwrap();
        let y = s.add_var("y", iv(0.0, 100.0)).unwrap();
        let z = s.add_var("z", iv(-1.0, -1.0)).unwrap();
        s.add_constraint(Constraint::Ternary { op: crate::interval::ArithOp::Sub, z, x: x.into(), y: y.into() })
            .unwrap();
        let cfg =
            SolverConfig { node_limit: Some(5), shave: ShaveMode::Off, strategy: Strategy::Std, ..Default::default() };
        let r = solve(&s, &[x, y], None, &cfg).unwrap();
        assert!(matches!(r.outcome, Outcome::LimitHit(_)));
    }
}
