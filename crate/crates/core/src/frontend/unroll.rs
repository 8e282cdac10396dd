use super::ast::{suspect_ids, BranchOrigin, Program, Stmt};

/// Replaces every loop by `k` nested guarded copies of its body, ending in a
/// residual guard. Conditionals are renumbered in pre-order afterwards so
/// that every copy has its own id.
pub fn unroll_loops(p: &Program, k: u32) -> Program {
    if !p.has_loops() {
        return p.clone();
    }
    let mut body = unroll_block(&p.body, k);
    let mut next = 0;
    renumber(&mut body, &mut next);
    Program { format: p.format, inputs: p.inputs.clone(), body }
}

fn unroll_block(stmts: &[Stmt], k: u32) -> Vec<Stmt> {
    stmts.iter().map(|s| unroll_stmt(s, k)).collect()
}

fn unroll_stmt(s: &Stmt, k: u32) -> Stmt {
    match s {
        Stmt::If { id, cond, then_branch, else_branch, origin, pos } => Stmt::If {
            id: *id,
            cond: cond.clone(),
            then_branch: unroll_block(then_branch, k),
            else_branch: unroll_block(else_branch, k),
            origin: *origin,
            pos: *pos,
        },
        Stmt::While { id, cond, body, pos } => {
            let body = unroll_block(body, k);
            let mut inner =
                Stmt::Residual { loop_id: *id, cond: cond.clone(), pos: *pos, body_suspects: suspect_ids(&body) };
            for iteration in (1..=k).rev() {
                let mut then_branch = body.clone();
                then_branch.push(inner);
                inner = Stmt::If {
                    id: 0,
                    cond: cond.clone(),
                    then_branch,
                    else_branch: Vec::new(),
                    origin: BranchOrigin::Loop { loop_id: *id, iteration },
                    pos: *pos,
                };
            }
            inner
        }
        other => other.clone(),
    }
}

fn renumber(stmts: &mut [Stmt], next: &mut u32) {
    for s in stmts {
        if let Stmt::If { id, then_branch, else_branch, .. } = s {
            *id = *next;
            *next += 1;
            renumber(then_branch, next);
            renumber(else_branch, next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::FloatFormat;
    use crate::frontend::parse_program;

    fn parse(src: &str) -> Program {
        parse_program(src, FloatFormat::BINARY32).unwrap()
    }

    #[test]
    fn loop_free_is_unchanged() {
        let p = parse("input a in [0, 1]; if (a < 0.5) { b = a; } else { b = 1; } @suspect b in [0, 1];");
        assert_eq!(unroll_loops(&p, 3), p);
    }

    #[test]
    fn two_copies_then_residual() {
        let p = parse("input a in [0, 1]; i = 0; while (i < a) { i = i + 1; } @suspect i in [0, 1];");
        let u = unroll_loops(&p, 2);
        assert!(!u.has_loops());
        let Stmt::If { id: 0, then_branch, origin, .. } = &u.body[1] else { panic!("{:?}", u.body[1]) };
        assert_eq!(*origin, BranchOrigin::Loop { loop_id: 0, iteration: 1 });
        assert!(matches!(then_branch[0], Stmt::Assign { .. }));
        let Stmt::If { id: 1, then_branch, origin, .. } = &then_branch[1] else { panic!() };
        assert_eq!(*origin, BranchOrigin::Loop { loop_id: 0, iteration: 2 });
        assert!(
            matches!(&then_branch[1], Stmt::Residual { loop_id: 0, body_suspects, .. } if body_suspects.is_empty())
        );
        assert_eq!(u.count_ifs(), 2);

        let u0 = unroll_loops(&p, 0);
        assert!(matches!(u0.body[1], Stmt::Residual { .. }));
    }
}
