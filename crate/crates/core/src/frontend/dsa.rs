use std::collections::HashMap;

use super::ast::{Cond, Expr, Program, Stmt};

/// The source variable a DSA version belongs to (`x#3` -> `x`).
pub fn base_name(version: &str) -> &str {
    version.split('#').next().unwrap_or(version)
}

/// Converts a loop-free program into dynamic single assignment form.
///
/// Every assignment writes a fresh version `x#n` (counters are global, so
/// versions are unique across the whole tree) and inputs keep their names.
/// Statements following a conditional are copied into both branches, so each
/// root-to-leaf walk of the result is one control path.
pub fn to_dsa(p: &Program) -> Program {
    assert!(!p.has_loops(), "to_dsa needs a loop-free program; unroll first");
    let env: HashMap<String, String> = p.inputs.iter().map(|d| (d.name.clone(), d.name.clone())).collect();
    let mut counters = HashMap::new();
    let body = convert(&p.body, env, &mut counters);
    Program { format: p.format, inputs: p.inputs.clone(), body }
}

fn convert(stmts: &[Stmt], mut env: HashMap<String, String>, counters: &mut HashMap<String, u32>) -> Vec<Stmt> {
    let mut out = Vec::new();
    for (i, s) in stmts.iter().enumerate() {
        match s {
            Stmt::Assign { target, expr, pos } => {
                let expr = rename(expr, &env);
                let n = counters.entry(target.clone()).or_insert(0);
                *n += 1;
                let version = format!("{target}#{n}");
                env.insert(target.clone(), version.clone());
                out.push(Stmt::Assign { target: version, expr, pos: *pos });
            }
            Stmt::If { id, cond, then_branch, else_branch, origin, pos } => {
                let rest = &stmts[i + 1..];
                let then_branch: Vec<Stmt> = then_branch.iter().chain(rest).cloned().collect();
                let else_branch: Vec<Stmt> = else_branch.iter().chain(rest).cloned().collect();
                out.push(Stmt::If {
                    id: *id,
                    cond: rename_cond(cond, &env),
                    then_branch: convert(&then_branch, env.clone(), counters),
                    else_branch: convert(&else_branch, env, counters),
                    origin: *origin,
                    pos: *pos,
                });
                return out;
            }
            Stmt::Suspect { id, var, interval, pos } => out.push(Stmt::Suspect {
                id: *id,
                var: env.get(var).cloned().unwrap_or_else(|| var.clone()),
                interval: interval.clone(),
                pos: *pos,
            }),
            Stmt::Residual { loop_id, cond, pos, body_suspects } => out.push(Stmt::Residual {
                loop_id: *loop_id,
                cond: rename_cond(cond, &env),
                pos: *pos,
                body_suspects: body_suspects.clone(),
            }),
            Stmt::While { .. } => unreachable!("loops are rejected above"),
        }
    }
    out
}

fn rename_cond(c: &Cond, env: &HashMap<String, String>) -> Cond {
    Cond { lhs: rename(&c.lhs, env), rel: c.rel, rhs: rename(&c.rhs, env) }
}

fn rename(e: &Expr, env: &HashMap<String, String>) -> Expr {
    match e {
        Expr::Num { .. } => e.clone(),
        Expr::Var(v) => Expr::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
        Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(rename(a, env)), Box::new(rename(b, env))),
        Expr::Neg(a) => Expr::Neg(Box::new(rename(a, env))),
        Expr::Sqrt(a) => Expr::Sqrt(Box::new(rename(a, env))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::FloatFormat;
    use crate::frontend::parse_program;

    fn dsa(src: &str) -> Program {
        to_dsa(&parse_program(src, FloatFormat::BINARY32).unwrap())
    }

    #[test]
    fn straight_line_versions() {
        let p = dsa("input x in [0, 1]; x = x + 1; x = x * 2; @suspect x in [0, 4];");
        let Stmt::Assign { target, expr, .. } = &p.body[0] else { panic!() };
        assert_eq!((target.as_str(), expr.to_string().as_str()), ("x#1", "x + 1"));
        let Stmt::Assign { target, expr, .. } = &p.body[1] else { panic!() };
        assert_eq!((target.as_str(), expr.to_string().as_str()), ("x#2", "x#1 * 2"));
        assert!(matches!(&p.body[2], Stmt::Suspect { var, .. } if var == "x#2"));
        assert_eq!(base_name("x#2"), "x");
    }

    #[test]
    fn branches_get_their_own_versions_and_the_tail() {
        let p = dsa("input a in [0, 1]; if (a < 0.5) { y = a; } else { y = 1; } z = y + a; @suspect z in [0, 1];");
        assert_eq!(p.body.len(), 1);
        let Stmt::If { then_branch, else_branch, .. } = &p.body[0] else { panic!() };
        let targets = |b: &[Stmt]| {
            b.iter()
                .filter_map(|s| match s {
                    Stmt::Assign { target, .. } => Some(target.clone()),
                    _ => None,
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(targets(then_branch), ["y#1", "z#1"]);
        assert_eq!(targets(else_branch), ["y#2", "z#2"]);
    }
}
