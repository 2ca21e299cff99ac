use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use permgame::automata::ParityAutomaton;
use permgame::bench::{generate, regression_corpus, BenchSpec, Family};
use permgame::formula::{check_fragment, closure, normalize, parse, Formula};
use permgame::game::{
    build_permutation_game, decide, decide_on_the_fly, Answer, DecideError, Options, SolverKind, Verdict,
};
use permgame::tracking::{build_complemented_dpa, build_tracking_pa, TrackingError};

#[derive(Parser)]
#[command(name = "permgame", version, about = "Satisfiability of the weakly aconjunctive mu-calculus via permutation games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the syntactic fragment checks of a formula.
    Check(Plain),
    /// Print the closure with provenance and alternation levels.
    Closure(Plain),
    /// Print the tracking automaton.
    Track(Plain),
    /// Print the determinized and complemented tracking automaton.
    Dpa(Plain),
    /// Print the permutation game.
    Game(GameArgs),
    /// Decide satisfiability.
    Solve(SolveArgs),
    /// Benchmark formulas and the regression corpus.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct Input {
    /// Formula text.
    #[arg(long, short = 'f', conflicts_with = "file")]
    formula: Option<String>,
    /// File containing the formula.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct Plain {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct Caps {
    /// Abort once the game has more nodes than this.
    #[arg(long)]
    node_cap: Option<NonZeroUsize>,
    /// Abort after this many seconds.
    #[arg(long, value_parser = positive_seconds)]
    time_cap: Option<Duration>,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    caps: Caps,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Zielonka,
    Fixpoint,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    Sat,
    Unsat,
}

#[derive(Args)]
struct Solving {
    /// Build and solve the game incrementally.
    #[arg(long)]
    on_the_fly: bool,
    /// Nodes expanded before the first incremental solve.
    #[arg(long, default_value_t = NonZeroUsize::new(256).unwrap())]
    cadence: NonZeroUsize,
    /// Skip model extraction and checking.
    #[arg(long)]
    no_certify: bool,
    #[arg(long, value_enum, default_value = "zielonka")]
    solver: Solver,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    solving: Solving,
    /// Exit with status 0 iff the verdict matches.
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Print a benchmark formula.
    Gen {
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        j: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Decide every regression corpus entry and compare with its expected verdict.
    Run {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[command(flatten)]
        solving: Solving,
    },
}

fn positive_seconds(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if secs > 0.0 && secs.is_finite() {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err("time cap must be positive".into())
    }
}

/// Failure with its exit status.
struct Failure(u8, String);

impl From<TrackingError> for Failure {
    fn from(e: TrackingError) -> Self {
        Failure(2, e.to_string())
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::Tracking(t) => t.into(),
            DecideError::Indeterminate { .. } => Failure(3, e.to_string()),
            DecideError::Certification(_) => Failure(4, e.to_string()),
        }
    }
}

fn read_formula(input: &Input) -> Result<Arc<Formula>, Failure> {
    let text = match (&input.formula, &input.file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?,
        (None, None) => return Err(Failure(2, "give --formula or --file".into())),
    };
    let surface = parse(&text).map_err(|e| Failure(2, e.to_string()))?;
    Ok(normalize(&surface))
}

fn options(s: &Solving) -> Options {
    Options {
        solver: match s.solver {
            Solver::Zielonka => SolverKind::Zielonka,
            Solver::Fixpoint => SolverKind::Fixpoint,
        },
        certify: !s.no_certify,
        node_cap: s.caps.node_cap.map(NonZeroUsize::get),
        time_cap: s.caps.time_cap,
        cadence: s.cadence.get(),
    }
}

fn run_decide(f: &Arc<Formula>, s: &Solving) -> Result<Verdict, DecideError> {
    let o = options(s);
    if s.on_the_fly {
        decide_on_the_fly(f, &o)
    } else {
        decide(f, &o)
    }
}

fn automaton_text(a: &ParityAutomaton) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "states {}  letters {}  transitions {}  index {}  initial {}",
        a.num_states(),
        a.num_letters(),
        a.num_transitions(),
        a.index(),
        a.state_names[a.initial]
    );
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "{} --{} / {}--> {}",
            a.state_names[t.source], a.letters[t.letter], t.priority, a.state_names[t.target]
        );
    }
    out
}

fn print_automaton(a: &ParityAutomaton, format: Format) {
    match format {
        Format::Text => print!("{}", automaton_text(a)),
        Format::Json => println!("{}", a.to_json()),
        Format::Dot => print!("{}", a.to_dot()),
    }
}

fn verdict_text(v: &Verdict) -> String {
    let s = &v.statistics;
    let mut out = format!("{}\n", v.answer);
    let _ = writeln!(
        out,
        "explored {}  nodes {}  edges {}  solves {}  iterations {}  time {:.3}s",
        s.explored_nodes,
        s.game_nodes,
        s.game_edges,
        s.solves,
        s.solver_iterations,
        s.wall_time.as_secs_f64()
    );
    if let Some(m) = &v.model {
        let _ = writeln!(out, "model:\n{}", m.to_json());
    }
    if let Some(r) = &v.refutation {
        let _ = writeln!(out, "refutation: {} Abelard moves", r.len());
    }
    out
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check(p) => {
            let f = read_formula(&p.input)?;
            let report = check_fragment(&f);
            match p.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
                _ => {
                    println!("formula: {f}");
                    println!("guarded: {}", report.guarded);
                    println!("clean: {}", report.clean);
                    println!("irredundant: {}", report.irredundant);
                    println!("aconjunctive: {}", report.aconjunctive);
                    println!("weakly aconjunctive: {}", report.weakly_aconjunctive);
                    println!("alternation depth: {}", report.alternation_depth);
                    if let Some(o) = &report.offending_subformula {
                        println!("offending subformula: {o}");
                    }
                }
            }
            Ok(if report.accepted() { 0 } else { 2 })
        }
        Command::Closure(p) => {
            let f = read_formula(&p.input)?;
            let c = closure(&f);
            match p.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&c.dump()).expect("closure serializes")),
                _ => print!("{c}"),
            }
            Ok(0)
        }
        Command::Track(p) => {
            let t = build_tracking_pa(&read_formula(&p.input)?)?;
            let mut a = t.pa.clone();
            a.letters = t.letters.iter().map(|l| t.describe_letter(l)).collect();
            print_automaton(&a, p.format);
            Ok(0)
        }
        Command::Dpa(p) => {
            let (_, c) = build_complemented_dpa(&read_formula(&p.input)?)?;
            print_automaton(&c, p.format);
            Ok(0)
        }
        Command::Game(g) => {
            let f = read_formula(&g.input)?;
            let o = Options {
                node_cap: g.caps.node_cap.map(NonZeroUsize::get),
                time_cap: g.caps.time_cap,
                ..Options::default()
            };
            let pg = build_permutation_game(&f, &o)?;
            match g.format {
                Format::Json => println!("{}", pg.to_json()),
                Format::Dot => print!("{}", pg.to_dot()),
                Format::Text => {
                    println!("nodes {}  edges {}", pg.game.num_nodes(), pg.game.num_edges());
                    for v in 0..pg.game.num_nodes() {
                        println!(
                            "{v} {:?} {:?} {} {}",
                            pg.game.owner[v],
                            pg.nodes.kind(v),
                            pg.sequent_text(v),
                            pg.nodes.det(v).display_with(&pg.state_names)
                        );
                        for e in &pg.game.edges[v] {
                            println!("  --{} / {}--> {}", pg.letter_text(e), e.priority, e.target);
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Solve(s) => {
            let f = read_formula(&s.input)?;
            let v = run_decide(&f, &s.solving)?;
            match s.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("verdict serializes")),
                _ => print!("{}", verdict_text(&v)),
            }
            Ok(match s.expect {
                None => 0,
                Some(e) => {
                    let wanted = match e {
                        Expect::Sat => Answer::Sat,
                        Expect::Unsat => Answer::Unsat,
                    };
                    u8::from(wanted != v.answer)
                }
            })
        }
        Command::Bench(BenchCommand::Gen { family, n, j, k }) => {
            let f = generate(&BenchSpec { family, n, j, k }).map_err(|e| Failure(2, e.to_string()))?;
            println!("{f}");
            Ok(0)
        }
        Command::Bench(BenchCommand::Run { max_n, solving }) => {
            let mut all_match = true;
            println!("{:<24} {:<8} {:<14} {:<9} {:>10} {:>9}", "entry", "expected", "verdict", "status", "nodes", "seconds");
            for e in regression_corpus(max_n) {
                let start = Instant::now();
                let f = normalize(&e.formula);
                let (verdict, status, nodes) = match run_decide(&f, &solving) {
                    Ok(v) if v.answer == e.expected => (v.answer.to_string(), "ok", v.statistics.game_nodes),
                    Ok(v) => (v.answer.to_string(), "MISMATCH", v.statistics.game_nodes),
                    Err(DecideError::Indeterminate { explored, .. }) => ("INDETERMINATE".into(), "ABORT", explored),
                    Err(err) => (format!("error: {err}"), "ERROR", 0),
                };
                all_match &= status == "ok";
                println!(
                    "{:<24} {:<8} {:<14} {:<9} {:>10} {:>9.3}",
                    e.name,
                    e.expected.to_string(),
                    verdict,
                    status,
                    nodes,
                    start.elapsed().as_secs_f64()
                );
            }
            Ok(u8::from(!all_match))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("permgame: {message}");
            ExitCode::from(code)
        }
    }
}
