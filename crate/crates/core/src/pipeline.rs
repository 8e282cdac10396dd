//! From program text to a verified answer: unroll, convert, enumerate paths,
//! search each one, and re-run any witness on the original program.

use std::time::Instant;

use thiserror::Error;

use crate::float::FloatValue;
use crate::frontend::{
    concrete_eval, enumerate_paths, parse_program, to_dsa, unroll_loops, Compiled, FrontendError, PathKind, Program,
    StepKind, Trace,
};
use crate::search::{solve, LeafOracle, Outcome, SearchError, SolverConfig, Stats, Strategy};

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    /// Input values, in declaration order, that reach the interval.
    Sat(Vec<(String, FloatValue)>),
    /// No input reaches the interval within the unrolling bound.
    Unsat,
    /// An incomplete strategy ran out of candidates.
    NotFound,
    Unknown(String),
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Sat(_) => "sat",
            Status::Unsat => "unsat",
            Status::NotFound => "notfound",
            Status::Unknown(_) => "unknown",
        }
    }

    /// Process exit code for this status.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Sat(_) => 0,
            Status::Unsat => 1,
            Status::NotFound | Status::Unknown(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub stats: Stats,
    /// The witness was re-run on the original program and hit the interval.
    pub verified: bool,
    /// Value of the annotated variable in the witness run.
    pub target: Option<FloatValue>,
    /// Branch decisions of the witness run.
    pub path: Vec<String>,
    pub strategy: Strategy,
    /// Path systems searched.
    pub systems: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Branch decisions of a run as `if@line:col=true` and the like.
pub fn describe_path(trace: &Trace) -> Vec<String> {
    trace
        .steps
        .iter()
        .map(|s| {
            let kind = match s.kind {
                StepKind::If => "if",
                StepKind::While => "while",
                StepKind::Residual => "residual",
            };
            format!("{kind}@{}={}", s.pos, s.taken)
        })
        .collect()
}

/// Picks the annotation to solve for: `requested` if given, else the only
/// one in the program.
pub fn select_suspect(p: &Program, requested: Option<u32>) -> Result<u32, FrontendError> {
    let all = p.suspects();
    match requested {
        Some(id) if all.iter().any(|s| s.0 == id) => Ok(id),
        Some(id) => Err(FrontendError::UnknownSuspect(id)),
        None => match all.len() {
            0 => Err(FrontendError::NoSuspect),
            1 => Ok(all[0].0),
            n => Err(FrontendError::MultipleSuspects(n)),
        },
    }
}

struct HitOracle<'a> {
    program: &'a Compiled,
    suspect: u32,
}

impl LeafOracle for HitOracle<'_> {
    fn accepts(&self, inputs: &[f64]) -> bool {
        self.program.hits(inputs, self.suspect)
    }
}

/// Parses `src` in binary32 and solves for annotation `suspect` (or the only
/// one).
pub fn solve_source(src: &str, suspect: Option<u32>, cfg: &SolverConfig) -> Result<SolveResult, PipelineError> {
    let p = parse_program(src, crate::float::FloatFormat::BINARY32)?;
    let id = select_suspect(&p, suspect)?;
    solve_program(&p, id, cfg)
}

pub fn solve_program(p: &Program, suspect: u32, cfg: &SolverConfig) -> Result<SolveResult, PipelineError> {
    let start = Instant::now();
    select_suspect(p, Some(suspect))?;
    let compiled = Compiled::new(p);
    let dsa = to_dsa(&unroll_loops(p, cfg.unroll_k));
    let mut systems = enumerate_paths(&dsa, suspect);
    // Paths to the target first; residual guards only matter if none hits.
    systems.sort_by_key(|s| matches!(s.kind, PathKind::Overflow { .. }));
    log::debug!("{} path systems for annotation {suspect}", systems.len());

    let oracle = HitOracle { program: &compiled, suspect };
    let deadline = start + cfg.timeout;
    let mut stats = Stats::default();
    let mut limit: Option<String> = None;
    let mut overflow: Option<u32> = None;
    let mut witness = None;
    for (i, sys) in systems.iter().enumerate() {
        let now = Instant::now();
        if now >= deadline {
            limit = Some(format!("timeout after {:.1} s", cfg.timeout.as_secs_f64()));
            break;
        }
        let mut sub = cfg.clone();
        sub.timeout = deadline - now;
        sub.node_limit = cfg.node_limit.map(|n| n.saturating_sub(stats.nodes));
        if sub.node_limit == Some(0) {
            limit = Some(format!("node limit {} reached", cfg.node_limit.unwrap_or(0)));
            break;
        }
        let vars: Vec<_> = sys.inputs.iter().map(|(_, v)| *v).collect();
        let leaf: Option<&dyn LeafOracle> = match sys.kind {
            PathKind::Target(_) => Some(&oracle),
            PathKind::Overflow { .. } => None,
        };
        let r = solve(&sys.store, &vars, leaf, &sub)?;
        log::debug!("system {i} ({:?}): {:?} after {} nodes", sys.kind, r.outcome, r.stats.nodes);
        log::trace!("system {i}:\n{}", sys.store.dump());
        stats.absorb(&r.stats);
        match (r.outcome, &sys.kind) {
            (Outcome::Found(w), PathKind::Target(_)) => {
                witness = Some(w);
                break;
            }
            (Outcome::Found(_), PathKind::Overflow { loop_id }) => overflow = Some(*loop_id),
            (Outcome::LimitHit(reason), _) => {
                limit = Some(reason);
                break;
            }
            (Outcome::Exhausted, _) => {}
        }
    }
    stats.time_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut result = SolveResult {
        status: Status::Unsat,
        stats,
        verified: false,
        target: None,
        path: Vec::new(),
        strategy: cfg.strategy,
        systems: systems.len(),
    };
    if let Some(w) = witness {
        let named: Vec<(String, FloatValue)> = p.input_names().into_iter().zip(w).collect();
        let trace = concrete_eval(p, &named.iter().cloned().collect()).expect("witness covers every input");
        let hit = trace.hit(suspect).ok_or_else(|| {
            SearchError::Soundness(format!("witness {named:?} does not reach the interval when re-run"))
        })?;
        result.verified = true;
        result.target = FloatValue::from_f64(p.format, hit.value).ok();
        result.path = describe_path(&trace);
        result.status = Status::Sat(named);
    } else if let Some(reason) = limit {
        result.status = Status::Unknown(reason);
    } else if let Some(loop_id) = overflow {
        result.status =
            Status::Unknown(format!("loop {loop_id} can run more than {} times before the annotation", cfg.unroll_k));
    } else if !cfg.strategy.is_complete() {
        result.status = Status::NotFound;
    }
    Ok(result)
}
