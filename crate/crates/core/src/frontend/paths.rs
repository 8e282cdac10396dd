use std::collections::HashMap;

use crate::interval::FpInterval;
use crate::store::{Constraint, ConstraintStore, SuspectSpec, Term, UnaryOp, VarId};

use super::ast::{suspect_ids, BranchOrigin, Cond, Expr, Program, Stmt};
use super::Pos;

/// One branch decision along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub if_id: u32,
    pub origin: BranchOrigin,
    pub pos: Pos,
    pub cond: String,
    pub taken: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    /// Reaches the annotation; the target interval is already posted.
    Target(SuspectSpec),
    /// Runs past the unrolling bound of a loop with the annotation still
    /// reachable. A solution here means the bound was too small.
    Overflow { loop_id: u32 },
}

/// The constraints of one control path.
#[derive(Debug, Clone)]
pub struct PathSystem {
    pub decisions: Vec<Decision>,
    pub store: ConstraintStore,
    /// Source input name and its store variable, in declaration order.
    pub inputs: Vec<(String, VarId)>,
    pub kind: PathKind,
}

/// Collects one system per path from the entry to an occurrence of suspect
/// annotation `suspect`, plus one per live residual loop guard.
///
/// An empty result means the annotation is unreachable.
pub fn enumerate_paths(dsa: &Program, suspect: u32) -> Vec<PathSystem> {
    let mut st =
        State { store: ConstraintStore::new(dsa.format), vars: HashMap::new(), temps: 0, decisions: Vec::new() };
    let mut inputs = Vec::new();
    for d in &dsa.inputs {
        let v = st.store.add_var(&d.name, d.interval.domain).expect("input names are unique");
        st.vars.insert(d.name.clone(), v);
        inputs.push((d.name.clone(), v));
    }
    let mut out = Vec::new();
    let w = Walker { suspect, inputs };
    w.walk(&dsa.body, st, &mut out);
    out
}

#[derive(Clone)]
struct State {
    store: ConstraintStore,
    vars: HashMap<String, VarId>,
    temps: u32,
    decisions: Vec<Decision>,
}

impl State {
    fn fresh(&mut self, name: &str) -> VarId {
        let v = self.store.add_var(name, FpInterval::full(self.store.format())).expect("DSA names are unique");
        self.vars.insert(name.to_string(), v);
        v
    }

    fn temp(&mut self) -> VarId {
        self.temps += 1;
        let name = format!("%t{}", self.temps);
        self.fresh(&name)
    }

    fn post(&mut self, c: Constraint) {
        self.store.add_constraint(c).expect("path constraints are well formed");
    }

    fn operand(&mut self, e: &Expr) -> Term {
        match e {
            Expr::Num { value, .. } => Term::Const(*value),
            Expr::Var(v) => Term::Var(self.vars[v]),
            _ => {
                let t = self.temp();
                self.define(t, e);
                Term::Var(t)
            }
        }
    }

    fn define(&mut self, z: VarId, e: &Expr) {
        let c = match e {
            Expr::Num { .. } | Expr::Var(_) => Constraint::Assign { z, x: self.operand(e) },
            Expr::Bin(op, a, b) => {
                let x = self.operand(a);
                let y = self.operand(b);
                Constraint::Ternary { op: *op, z, x, y }
            }
            Expr::Neg(a) => Constraint::Unary { op: UnaryOp::Neg, z, x: self.operand(a) },
            Expr::Sqrt(a) => Constraint::Unary { op: UnaryOp::Sqrt, z, x: self.operand(a) },
        };
        self.post(c);
    }

    fn condition(&mut self, c: &Cond, holds: bool) {
        let x = self.operand(&c.lhs);
        let y = self.operand(&c.rhs);
        let rel = if holds { c.rel } else { c.rel.negate() };
        self.post(Constraint::Compare { rel, x, y });
    }
}

struct Walker {
    suspect: u32,
    inputs: Vec<(String, VarId)>,
}

impl Walker {
    fn emit(&self, st: &State, kind: PathKind, out: &mut Vec<PathSystem>) {
        out.push(PathSystem {
            decisions: st.decisions.clone(),
            store: st.store.clone(),
            inputs: self.inputs.clone(),
            kind,
        });
    }

    fn walk(&self, stmts: &[Stmt], mut st: State, out: &mut Vec<PathSystem>) {
        for (i, s) in stmts.iter().enumerate() {
            match s {
                Stmt::Assign { target, expr, .. } => {
                    let z = st.fresh(target);
                    st.define(z, expr);
                }
                Stmt::If { id, cond, then_branch, else_branch, origin, pos } => {
                    debug_assert!(i + 1 == stmts.len(), "DSA conditionals end their block");
                    for (taken, branch) in [(true, then_branch), (false, else_branch)] {
                        let mut b = st.clone();
                        b.condition(cond, taken);
                        b.decisions.push(Decision {
                            if_id: *id,
                            origin: *origin,
                            pos: *pos,
                            cond: cond.to_string(),
                            taken,
                        });
                        self.walk(branch, b, out);
                    }
                    return;
                }
                Stmt::Suspect { id, var, interval, .. } if *id == self.suspect => {
                    let target_var = st.vars[var];
                    let mut t = st.clone();
                    t.store.restrict(target_var, &interval.domain);
                    let spec = SuspectSpec { target_var, location: *id, interval: interval.domain, tolerance: None };
                    self.emit(&t, PathKind::Target(spec), out);
                }
                Stmt::Suspect { .. } => {}
                Stmt::Residual { loop_id, cond, body_suspects, .. } => {
                    let live =
                        body_suspects.contains(&self.suspect) || suspect_ids(&stmts[i + 1..]).contains(&self.suspect);
                    if live {
                        let mut o = st.clone();
                        o.condition(cond, true);
                        self.emit(&o, PathKind::Overflow { loop_id: *loop_id }, out);
                    }
                    st.condition(cond, false);
                }
                Stmt::While { .. } => unreachable!("paths are enumerated on loop-free programs"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::FloatFormat;
    use crate::frontend::{parse_program, to_dsa, unroll_loops};

    fn systems(src: &str, k: u32) -> Vec<PathSystem> {
        let p = parse_program(src, FloatFormat::BINARY32).unwrap();
        enumerate_paths(&to_dsa(&unroll_loops(&p, k)), 0)
    }

    #[test]
    fn straight_line_has_one_path() {
        let s = systems("input a in [1, 2]; b = (a + 1) * a; @suspect b in [0, 10];", 0);
        assert_eq!(s.len(), 1);
        let dump = s[0].store.dump();
        assert!(dump.contains("%t1 = a + 1"), "{dump}");
        assert!(dump.contains("b#1 = %t1 * a"), "{dump}");
        assert!(matches!(s[0].kind, PathKind::Target(_)));
    }

    #[test]
    fn nested_ifs_give_four_paths() {
        let s = systems(
            "input a in [0, 4]; input b in [0, 4];
             if (a < 2) { x = a; } else { x = b; }
             if (b < 2) { y = x; } else { y = a; }
             @suspect y in [0, 1];",
            0,
        );
        assert_eq!(s.len(), 4);
        let taken: Vec<Vec<bool>> = s.iter().map(|p| p.decisions.iter().map(|d| d.taken).collect()).collect();
        assert_eq!(taken, [[true, true], [true, false], [false, true], [false, false]]);
    }

    #[test]
    fn residual_guard_only_when_target_still_reachable() {
        let after = "input a in [0, 4]; i = 0; while (i < a) { i = i + 1; } @suspect i in [0, 1];";
        let kinds: Vec<bool> = systems(after, 1).iter().map(|p| matches!(p.kind, PathKind::Overflow { .. })).collect();
        // loop entered: past the bound, then back in; loop skipped
        assert_eq!(kinds, [true, false, false]);

        let before = "input a in [0, 4]; @suspect a in [0, 1]; i = 0; while (i < a) { i = i + 1; }";
        assert!(systems(before, 1).iter().all(|p| matches!(p.kind, PathKind::Target(_))));
    }

    #[test]
    fn annotation_beyond_the_bound_leaves_only_the_residual() {
        let s = systems("input a in [0, 4]; i = 0; while (i < a) { @suspect i in [0, 1]; i = i + 1; }", 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, PathKind::Overflow { loop_id: 0 });
    }
}
