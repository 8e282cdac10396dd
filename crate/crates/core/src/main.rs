use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use fpcheck::bench::{self, CASES, PENDING};
use fpcheck::float::{FloatFormat, FloatValue};
use fpcheck::frontend::{concrete_eval, parse_program, real_eval, Program};
use fpcheck::gentest::gentest;
use fpcheck::pipeline::{describe_path, select_suspect, solve_program, PipelineError, Status};
use fpcheck::report::{digest, FloatText, ReportStats, RunReport};
use fpcheck::search::{ShaveMode, SolverConfig, Strategy};

const EXIT_USAGE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "fpcheck", version, about = "Find inputs that drive a float program into a suspicious interval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Text,
    Json,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Search strategy: std, fpc or fp3s (alias fpc3s).
    #[arg(long, default_value = "fpc")]
    strategy: Strategy,
    /// How many times each loop is unrolled.
    #[arg(long = "unroll", default_value_t = 10)]
    unroll: u32,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 180.0)]
    timeout: f64,
    /// Where to run 3B shaving: root, nodes or off.
    #[arg(long, default_value = "root")]
    shave: ShaveMode,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Worker threads for the search.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Search for inputs that reach an annotation's interval.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolveArgs,
        /// Annotation index (0-based, in source order); needed when the file has several.
        #[arg(long)]
        suspect: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Run the program on given inputs and show every value.
    Eval {
        file: PathBuf,
        /// Input value as name=value; value is a decimal or a 0x bit pattern.
        #[arg(long = "input", value_name = "NAME=VALUE")]
        inputs: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Random testing: sample inputs until one reaches the interval.
    Gentest {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        suspect: Option<u32>,
        /// Stop after this many seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Run the bundled benchmark table and compare against the known answers.
    Bench {
        #[arg(long, default_value = "paper")]
        suite: String,
        /// Strategies to run; all three by default.
        #[arg(long = "strategy")]
        strategies: Vec<Strategy>,
        /// Per-cell budget in seconds.
        #[arg(long, default_value_t = 180.0)]
        timeout: f64,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        match e {
            PipelineError::Frontend(e) => Failure::Usage(e.to_string()),
            PipelineError::Search(e) => Failure::Internal(e.to_string()),
        }
    }
}

fn init_logging() {
    let filter = match std::env::var("FPCS_LOG").as_deref() {
        Ok("stats") => "fpcheck=info",
        Ok("trace") => "fpcheck=trace",
        _ => "off",
    };
    env_logger::Builder::new().parse_filters(filter).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.command {
        Command::Solve { file, solver, suspect, out } => cmd_solve(&file, &solver, suspect, out),
        Command::Eval { file, inputs, out } => cmd_eval(&file, &inputs, out),
        Command::Gentest { file, trials, seed, suspect, timeout, out } => {
            cmd_gentest(&file, trials, seed, suspect, timeout, out)
        }
        Command::Bench { suite, strategies, timeout } => cmd_bench(&suite, &strategies, timeout),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn load(file: &PathBuf) -> Result<(String, Program), Failure> {
    let src = std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let p =
        parse_program(&src, FloatFormat::BINARY32).map_err(|e| Failure::Usage(format!("{}:{e}", file.display())))?;
    Ok((src, p))
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure::Usage(format!("timeout must be a positive number of seconds, got {s}")))
}

fn config(a: &SolveArgs) -> Result<SolverConfig, Failure> {
    Ok(SolverConfig {
        strategy: a.strategy,
        unroll_k: a.unroll,
        timeout: seconds(a.timeout)?,
        node_limit: a.node_limit,
        shave: a.shave,
        workers: a.workers.max(1),
        ..SolverConfig::default()
    })
}

fn print_report(r: &RunReport, out: Out) {
    match out {
        Out::Text => print!("{}", r.to_text()),
        Out::Json => println!("{}", r.to_json()),
    }
}

fn cmd_solve(file: &PathBuf, a: &SolveArgs, suspect: Option<u32>, out: Out) -> Result<u8, Failure> {
    let (src, p) = load(file)?;
    let cfg = config(a)?;
    let id = select_suspect(&p, suspect).map_err(|e| Failure::Usage(e.to_string()))?;
    let result = solve_program(&p, id, &cfg)?;
    log::info!(
        "{} path systems, {} nodes, {} propagations, depth {}, {:.1} ms",
        result.systems,
        result.stats.nodes,
        result.stats.propagations,
        result.stats.max_depth,
        result.stats.time_ms
    );
    print_report(&RunReport::from_result(&result, &src), out);
    Ok(result.status.exit_code() as u8)
}

fn parse_inputs(p: &Program, raw: &[String]) -> Result<HashMap<String, FloatValue>, Failure> {
    let mut inputs = HashMap::new();
    for item in raw {
        let (name, value) =
            item.split_once('=').ok_or_else(|| Failure::Usage(format!("expected NAME=VALUE, got `{item}`")))?;
        let name = name.trim();
        let decl = p
            .inputs
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Failure::Usage(format!("`{name}` is not an input of the program")))?;
        let v = FloatValue::parse(p.format, value).map_err(|e| Failure::Usage(format!("{name}: {e}")))?;
        if !decl.interval.domain.contains(v.to_f64()) {
            eprintln!("warning: {name} = {} is outside its declared range {}", value.trim(), decl.interval.text);
        }
        inputs.insert(name.to_string(), v);
    }
    if let Some(d) = p.inputs.iter().find(|d| !inputs.contains_key(&d.name)) {
        return Err(Failure::Usage(format!("no value given for input `{}`", d.name)));
    }
    Ok(inputs)
}

fn cmd_eval(file: &PathBuf, raw: &[String], out: Out) -> Result<u8, Failure> {
    let (_, p) = load(file)?;
    let inputs = parse_inputs(&p, raw)?;
    let trace = concrete_eval(&p, &inputs).map_err(|e| Failure::Usage(e.to_string()))?;
    let real = real_eval(&p, &inputs).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = |v: f64| FloatValue::from_f64(p.format, v).map(|f| FloatText::from(&f));
    let values: BTreeMap<String, f64> = trace.final_values();
    let path = describe_path(&trace);
    match out {
        Out::Json => {
            let vars: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(n, &v)| {
                    let (dec, hex) = match text(v) {
                        Ok(t) => (t.dec, t.hex),
                        Err(_) => (format!("{v}"), String::new()),
                    };
                    let r = real.get(n).copied().flatten();
                    (n.clone(), serde_json::json!({ "dec": dec, "hex": hex, "real": r }))
                })
                .collect();
            let suspects: Vec<_> = trace
                .suspects
                .iter()
                .map(|s| serde_json::json!({ "id": s.id, "value": s.value, "hit": s.hit }))
                .collect();
            let doc = serde_json::json!({
                "values": vars,
                "path": path,
                "suspects": suspects,
                "non_finite": trace.non_finite,
                "truncated": trace.truncated,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("plain JSON"));
        }
        Out::Text => {
            println!("{:<16} {:<16} {:<12} real", "variable", "value", "bits");
            for (n, &v) in &values {
                let (dec, hex) = match text(v) {
                    Ok(t) => (t.dec, t.hex),
                    Err(_) => (format!("{v}"), "-".to_string()),
                };
                // The real run may follow other branches than the float one.
                let r = match real.get(n) {
                    Some(Some(r)) => format!("{r:e}"),
                    Some(None) => "undefined".to_string(),
                    None => "-".to_string(),
                };
                println!("{n:<16} {dec:<16} {hex:<12} {r}");
            }
            println!("path: {}", if path.is_empty() { "-".to_string() } else { path.join(" ") });
            for s in &trace.suspects {
                let v = text(s.value).map_or_else(|_| format!("{}", s.value), |t| t.dec);
                println!("annotation {}: {v} {}", s.id, if s.hit { "in interval" } else { "outside" });
            }
            if trace.non_finite {
                println!("note: a non-finite value was computed");
            }
            if trace.truncated {
                println!("note: stopped after {} loop iterations", fpcheck::frontend::ITERATION_CAP);
            }
        }
    }
    Ok(0)
}

fn cmd_gentest(
    file: &PathBuf,
    trials: u64,
    seed: u64,
    suspect: Option<u32>,
    timeout: Option<f64>,
    out: Out,
) -> Result<u8, Failure> {
    let (src, p) = load(file)?;
    let id = select_suspect(&p, suspect).map_err(|e| Failure::Usage(e.to_string()))?;
    let timeout = timeout.map(seconds).transpose()?;
    let g = gentest(&p, id, trials, seed, timeout);
    let mut report = RunReport {
        status: Status::NotFound.name().to_string(),
        witness: None,
        target: None,
        verified: false,
        strategy: "gentest".to_string(),
        stats: ReportStats { nodes: g.trials, propagations: 0, time_ms: g.time_ms },
        path: Vec::new(),
        digest: digest(&src),
        reason: None,
    };
    let mut code = Status::NotFound.exit_code();
    if let Some(hit) = &g.hit {
        let trace = concrete_eval(&p, &hit.iter().cloned().collect()).map_err(|e| Failure::Internal(e.to_string()))?;
        let value = trace.hit(id).ok_or_else(|| Failure::Internal("sampled hit does not replay".into()))?.value;
        report.status = "sat".to_string();
        report.witness = Some(hit.iter().map(|(n, v)| (n.clone(), FloatText::from(v))).collect());
        report.target = FloatValue::from_f64(p.format, value).ok().map(|v| FloatText::from(&v));
        report.verified = true;
        report.path = describe_path(&trace);
        code = 0;
    } else if g.trials < trials {
        report.reason = Some(format!("stopped after {} of {trials} trials", g.trials));
    }
    print_report(&report, out);
    Ok(code as u8)
}

fn cmd_bench(suite: &str, strategies: &[Strategy], timeout: f64) -> Result<u8, Failure> {
    if suite != "paper" {
        return Err(Failure::Usage(format!("unknown suite `{suite}` (only `paper` is bundled)")));
    }
    let strategies = if strategies.is_empty() { Strategy::ALL.to_vec() } else { strategies.to_vec() };
    let timeout = seconds(timeout)?;
    let mut mismatches = 0;
    println!("{:<16} {:<32} {:<5} {:<9} {:>10}  expected", "program", "condition", "strat", "status", "time");
    for case in CASES {
        let p = parse_program(case.source(), FloatFormat::BINARY32).map_err(|e| Failure::Internal(e.to_string()))?;
        for &strategy in &strategies {
            let cfg = SolverConfig { strategy, timeout, ..SolverConfig::default() };
            let r = solve_program(&p, case.suspect, &cfg)?;
            let ok = case.matches(strategy, &r.status);
            if !ok {
                mismatches += 1;
            }
            let expected = match (strategy, case.expected) {
                (Strategy::Fp3s, _) if case.fp3s_finds => "sat",
                (Strategy::Fp3s, _) => "notfound",
                (_, bench::Expected::Reachable) => "sat",
                (_, bench::Expected::Unreachable) => "unsat",
            };
            println!(
                "{:<16} {:<32} {:<5} {:<9} {:>8.3} s  {expected}{}",
                case.program,
                case.condition,
                strategy.name(),
                r.status.name(),
                r.stats.time_ms / 1e3,
                if ok { "" } else { "  MISMATCH" }
            );
        }
    }
    for (program, condition) in PENDING {
        println!("{program:<16} {condition:<32} pending: source not bundled");
    }
    println!("{mismatches} mismatch(es)");
    Ok(if mismatches == 0 { 0 } else { 1 })
}
