//! Constraint stores over float domains: rounding-aware projections, the 2B
//! fixpoint and 3B shaving.

mod constraint;
mod preimage;
mod project;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::float::FloatFormat;
use crate::interval::FpInterval;

pub use constraint::{Constraint, Rel, Term, UnaryOp, VarId};
pub use preimage::{rounding_preimage, RealInterval};

use project::{project, Frame};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("variable `{0}` declared twice")]
    DuplicateName(String),
    #[error("unknown variable id {0}")]
    UnknownVar(u32),
    #[error("domain or constant is not in the store format")]
    FormatMismatch,
}

/// Projections per constraint after which a fixpoint run counts as slowly
/// converging. From then on a narrowed domain only wakes its constraints if
/// it lost at least 1/`SIGNIFICANT_SHRINK` of its values or became a
/// singleton. The result is still sound, just possibly short of the exact
/// 2B fixpoint.
const EXACT_ROUNDS: u64 = 200;
const SIGNIFICANT_SHRINK: u64 = 64;

/// What to look for: `target_var` taking a value in `interval` at the
/// annotated program point `location`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspectSpec {
    pub target_var: VarId,
    pub location: u32,
    pub interval: FpInterval,
    /// The tolerance the interval was derived with, kept for reports.
    pub tolerance: Option<String>,
}

/// Variables with interval domains plus the constraints linking them.
///
/// Cloning is cheap: the constraint set and adjacency are shared, only the
/// domains are copied.
#[derive(Clone)]
pub struct ConstraintStore {
    format: FloatFormat,
    names: Arc<Vec<String>>,
    constraints: Arc<Vec<Constraint>>,
    adjacency: Arc<Vec<Vec<usize>>>,
    domains: Vec<FpInterval>,
    failed: bool,
    /// Variables narrowed since the last fixpoint.
    dirty: Vec<VarId>,
    /// Constraints added since the last fixpoint.
    fresh: Vec<usize>,
    propagations: u64,
}

impl ConstraintStore {
    pub fn new(format: FloatFormat) -> ConstraintStore {
        ConstraintStore {
            format,
            names: Arc::new(Vec::new()),
            constraints: Arc::new(Vec::new()),
            adjacency: Arc::new(Vec::new()),
            domains: Vec::new(),
            failed: false,
            dirty: Vec::new(),
            fresh: Vec::new(),
            propagations: 0,
        }
    }

    pub fn format(&self) -> FloatFormat {
        self.format
    }

    pub fn add_var(&mut self, name: &str, domain: FpInterval) -> Result<VarId, StoreError> {
        if domain.format() != self.format {
            return Err(StoreError::FormatMismatch);
        }
        if self.names.iter().any(|n| n == name) {
            return Err(StoreError::DuplicateName(name.to_string()));
        }
        let id = VarId(self.names.len() as u32);
        Arc::make_mut(&mut self.names).push(name.to_string());
        Arc::make_mut(&mut self.adjacency).push(Vec::new());
        self.domains.push(domain);
        if domain.is_empty() {
            self.failed = true;
        }
        Ok(id)
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<(), StoreError> {
        let terms: Vec<Term> = match &c {
            Constraint::Ternary { z, x, y, .. } => vec![Term::Var(*z), *x, *y],
            Constraint::Unary { z, x, .. } | Constraint::Assign { z, x } => vec![Term::Var(*z), *x],
            Constraint::Compare { x, y, .. } => vec![*x, *y],
        };
        for t in &terms {
            match t {
                Term::Var(v) if v.index() >= self.names.len() => return Err(StoreError::UnknownVar(v.0)),
                Term::Const(k) if k.format() != self.format || !k.is_finite() => {
                    return Err(StoreError::FormatMismatch)
                }
                _ => {}
            }
        }
        let idx = self.constraints.len();
        let mut vars = c.vars();
        vars.sort();
        vars.dedup();
        let adjacency = Arc::make_mut(&mut self.adjacency);
        for v in vars {
            adjacency[v.index()].push(idx);
        }
        Arc::make_mut(&mut self.constraints).push(c);
        self.fresh.push(idx);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.names.len() as u32).map(VarId)
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|i| VarId(i as u32))
    }

    pub fn domain(&self, v: VarId) -> FpInterval {
        self.domains[v.index()]
    }

    pub fn domains(&self) -> &[FpInterval] {
        &self.domains
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Constraints mentioning `v`.
    pub fn adjacent(&self, v: VarId) -> &[usize] {
        &self.adjacency[v.index()]
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// Number of projection applications performed so far.
    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    /// Returns the projection count and resets it.
    pub fn take_propagations(&mut self) -> u64 {
        std::mem::take(&mut self.propagations)
    }

    /// Intersects `v`'s domain with `d`. Returns false if the store failed.
    pub fn restrict(&mut self, v: VarId, d: &FpInterval) -> bool {
        if self.failed {
            return false;
        }
        let old = self.domains[v.index()];
        let new = old.intersect(d);
        if new.is_empty() {
            self.failed = true;
            return false;
        }
        if new != old {
            self.domains[v.index()] = new;
            if !self.dirty.contains(&v) {
                self.dirty.push(v);
            }
        }
        true
    }

    /// 2B fixpoint over the pending work. Returns false if some domain
    /// became empty.
    pub fn propagate(&mut self) -> bool {
        self.run_fixpoint(None::<&mut rand::rngs::ThreadRng>)
    }

    /// As [`propagate`](Self::propagate), but with the worklist shuffled by
    /// `rng` at every step; the fixpoint reached is the same.
    pub fn propagate_shuffled<R: Rng>(&mut self, rng: &mut R) -> bool {
        self.run_fixpoint(Some(rng))
    }

    fn run_fixpoint<R: Rng>(&mut self, mut rng: Option<&mut R>) -> bool {
        if self.failed {
            return false;
        }
        let n = self.constraints.len();
        let mut queued = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        fn enqueue(c: usize, queue: &mut VecDeque<usize>, queued: &mut [bool]) {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        for c in std::mem::take(&mut self.fresh) {
            enqueue(c, &mut queue, &mut queued);
        }
        for v in std::mem::take(&mut self.dirty) {
            for &c in &self.adjacency[v.index()] {
                enqueue(c, &mut queue, &mut queued);
            }
        }
        let constraints = Arc::clone(&self.constraints);
        let adjacency = Arc::clone(&self.adjacency);
        let mut changed = Vec::new();
        let mut before: Vec<(VarId, u64)> = Vec::new();
        let exact_budget = EXACT_ROUNDS * n as u64;
        let mut steps = 0u64;
        loop {
            let next = match rng.as_deref_mut() {
                Some(r) if !queue.is_empty() => {
                    let i = r.gen_range(0..queue.len());
                    queue.swap_remove_back(i)
                }
                _ => queue.pop_front(),
            };
            let Some(ci) = next else { break };
            queued[ci] = false;
            changed.clear();
            self.propagations += 1;
            steps += 1;
            let converging_slowly = steps > exact_budget;
            if converging_slowly {
                before.clear();
                before.extend(constraints[ci].vars().into_iter().map(|v| (v, self.domains[v.index()].count())));
            }
            let mut frame = Frame { format: self.format, doms: &mut self.domains, changed: &mut changed };
            if project(&constraints[ci], &mut frame).is_err() {
                self.failed = true;
                return false;
            }
            for v in &changed {
                if converging_slowly {
                    let old = before.iter().find(|b| b.0 == *v).map_or(u64::MAX, |b| b.1);
                    let new = self.domains[v.index()].count();
                    if new > 1 && (old - new) * SIGNIFICANT_SHRINK < old {
                        continue;
                    }
                }
                for &c in &adjacency[v.index()] {
                    enqueue(c, &mut queue, &mut queued);
                }
            }
        }
        true
    }

    /// 3B shaving: repeatedly tries to refute a boundary slice of each
    /// domain (`slice_fraction` of its width, at least one float) and removes
    /// the slice when 2B propagation on it fails. Runs until no slice can be
    /// removed. Returns false if the store failed.
    pub fn shave(&mut self, slice_fraction: f64) -> bool {
        if !self.propagate() {
            return false;
        }
        loop {
            let mut progress = false;
            for v in self.vars().collect::<Vec<_>>() {
                for upper in [false, true] {
                    match self.shave_side(v, upper, slice_fraction) {
                        None => return false,
                        Some(p) => progress |= p,
                    }
                }
            }
            if !progress {
                return true;
            }
        }
    }

    /// `None` on failure, otherwise whether anything was removed.
    fn shave_side(&mut self, v: VarId, upper: bool, fraction: f64) -> Option<bool> {
        let f = self.format;
        let mut removed = false;
        loop {
            let (lo, hi) = self.domains[v.index()].bounds()?;
            if lo == hi {
                return Some(removed);
            }
            let step = (hi - lo) * fraction;
            let (slice, rest) = if upper {
                let cut = f.ceil(hi - step).max(f.next_up(lo)).min(hi);
                (FpInterval::from_grid(f, cut, hi), FpInterval::from_grid(f, lo, f.next_down(cut)))
            } else {
                let cut = f.floor(lo + step).min(f.next_down(hi)).max(lo);
                (FpInterval::from_grid(f, lo, cut), FpInterval::from_grid(f, f.next_up(cut), hi))
            };
            let mut trial = self.clone();
            let consistent = trial.restrict(v, &slice) && trial.propagate();
            self.propagations = trial.propagations;
            if consistent {
                return Some(removed);
            }
            removed = true;
            if !(self.restrict(v, &rest) && self.propagate()) {
                return None;
            }
        }
    }

    /// One line per variable `name ∈ [lo, hi] (count=N)`, then one line per
    /// constraint.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (name, d) in self.names.iter().zip(&self.domains) {
            let _ = writeln!(out, "{name} ∈ {d:?} (count={})", d.count());
        }
        for c in self.constraints.iter() {
            let _ = writeln!(out, "{}", c.display(&self.names));
        }
        out
    }
}

impl std::fmt::Debug for ConstraintStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.dump())
    }
}
