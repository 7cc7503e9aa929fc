//! `repfree`: parse process terms, explore their state spaces, decide the
//! visibility predicates, compare systems by stratified simulation and verify
//! replacement-freeness witnesses.
//!
//! Exit codes are a stable contract: 0 success/holds, 1 semantic negative,
//! 2 input error, 3 inconclusive (a bound was hit).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repfree_core::lts::{
    explore, explore_with_universe, is_visible_lts, ExplorationBounds, Verdict,
};
use repfree_core::profile::{CalculusProfile, DefinitionEnv, OrderedAction, PriorityOrder};
use repfree_core::sampling::{
    gen_ccs_context, gen_ccs_invisible, gen_ccs_process, gen_pi_closed_invisible, gen_pi_context,
    gen_pi_invisible, gen_pi_process, rng_from_seed, PiGenOptions,
};
use repfree_core::sim::{distinguishing_depth, distinguishing_trace, sim_k, sim_omega};
use repfree_core::sos::Universe;
use repfree_core::surface::parse_term;
use repfree_core::term::{plug, Term};
use repfree_core::witness::{load_witness, run_corpus, verify_witness};
use repfree_core::Name;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "repfree",
    version,
    about = "Process-algebra workbench: semantics, visibility predicates, simulation and replacement-freeness witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CalcKind {
    Ccs,
    Pi,
    Pimpm,
    #[value(name = "bccsp-theta")]
    BccspTheta,
    Cpg,
    #[value(name = "ccs-sg")]
    CcsSg,
    #[value(name = "ccs-prio")]
    CcsPrio,
    Cows,
}

#[derive(Args)]
struct CalcArgs {
    /// Calculus the input is interpreted in.
    #[arg(long = "calc", value_enum)]
    calc: CalcKind,
    /// Priority order pairs for bccsp-theta, e.g. "a<tau,b<a".
    #[arg(long)]
    order: Option<String>,
    /// Process definition, e.g. `A(x) = x.A<x>`; repeatable.
    #[arg(long = "def")]
    defs: Vec<String>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Maximum number of explored states [env: REPFREE_MAX_STATES].
    #[arg(long)]
    max_states: Option<usize>,
    /// Maximum exploration depth [env: REPFREE_MAX_DEPTH].
    #[arg(long)]
    max_depth: Option<usize>,
    /// Maximum replication unfoldings along a path [env: REPFREE_MAX_BANG_UNFOLD].
    #[arg(long)]
    max_bang_unfold: Option<usize>,
}

impl BoundsArgs {
    fn resolve(&self) -> Result<ExplorationBounds, String> {
        let env = |key: &str| -> Result<Option<usize>, String> {
            match std::env::var(key) {
                Ok(v) => v
                    .parse::<usize>()
                    .map(Some)
                    .map_err(|_| format!("{key} must be a number, got {v:?}")),
                Err(_) => Ok(None),
            }
        };
        let defaults = ExplorationBounds::default();
        Ok(ExplorationBounds {
            max_states: self
                .max_states
                .or(env("REPFREE_MAX_STATES")?)
                .unwrap_or(defaults.max_states),
            max_depth: self
                .max_depth
                .or(env("REPFREE_MAX_DEPTH")?)
                .unwrap_or(defaults.max_depth),
            max_bang_unfold: self
                .max_bang_unfold
                .or(env("REPFREE_MAX_BANG_UNFOLD")?)
                .unwrap_or(defaults.max_bang_unfold),
        })
    }

    /// Only an override when something was given explicitly (flags or env).
    fn resolve_override(&self) -> Result<Option<ExplorationBounds>, String> {
        let given = self.max_states.is_some()
            || self.max_depth.is_some()
            || self.max_bang_unfold.is_some()
            || std::env::var("REPFREE_MAX_STATES").is_ok()
            || std::env::var("REPFREE_MAX_DEPTH").is_ok()
            || std::env::var("REPFREE_MAX_BANG_UNFOLD").is_ok();
        if given {
            self.resolve().map(Some)
        } else {
            Ok(None)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LtsFormat {
    Human,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term file, validate it against the calculus and echo the
    /// canonical pretty form.
    Parse {
        file: PathBuf,
        #[command(flatten)]
        calc: CalcArgs,
    },
    /// Explore the bounded state space and write it out.
    Lts {
        file: PathBuf,
        #[command(flatten)]
        calc: CalcArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, value_enum, default_value = "human")]
        format: LtsFormat,
    },
    /// Decide whether the process can weakly perform a visible action.
    Visible {
        file: PathBuf,
        #[command(flatten)]
        calc: CalcArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check whether the second system simulates the first, stratified to
    /// depth k or at the fixpoint.
    Sim {
        file_q: PathBuf,
        file_p: PathBuf,
        #[command(flatten)]
        calc: CalcArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Check the k-th stratum only.
        #[arg(long, conflicts_with = "fix")]
        k: Option<u32>,
        /// Iterate to the fixpoint (default).
        #[arg(long)]
        fix: bool,
        #[arg(long)]
        json: bool,
    },
    /// Verify a single witness file.
    WitnessVerify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Verify every witness in a directory and summarize.
    CorpusRun {
        dir: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Sample random freeness triples and check the visibility transfer plus
    /// the simulation membership.
    Sample {
        /// One of: ccs, pi, pimpm.
        #[arg(long = "calc", value_enum)]
        calc: CalcKind,
        #[arg(long, default_value_t = 100)]
        triples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn input_error(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn parse_defs(defs: &[String]) -> Result<DefinitionEnv, String> {
    let mut env = DefinitionEnv::empty();
    for def in defs {
        let (head, body) = def
            .split_once('=')
            .ok_or_else(|| format!("definition {def:?} must look like \"A(x) = body\""))?;
        let head = head.trim();
        let (name, params) = match head.split_once('(') {
            Some((name, rest)) => {
                let rest = rest
                    .trim_end()
                    .strip_suffix(')')
                    .ok_or_else(|| format!("definition head {head:?} missing `)`"))?;
                let params: Vec<Name> = rest
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(Name::new)
                    .collect();
                (name.trim(), params)
            }
            None => (head, Vec::new()),
        };
        let body =
            repfree_core::parse_unchecked(body.trim()).map_err(|e| format!("{name}: {e}"))?;
        env.define(name, params, body).map_err(|e| e.to_string())?;
    }
    Ok(env)
}

fn parse_order(input: &str) -> Result<PriorityOrder, String> {
    let mut pairs = Vec::new();
    for part in input.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (lo, hi) = part
            .split_once('<')
            .ok_or_else(|| format!("order entry {part:?} must look like \"a<tau\""))?;
        let act = |s: &str| {
            let s = s.trim();
            if s == "tau" {
                OrderedAction::Tau
            } else {
                OrderedAction::Act(Name::new(s))
            }
        };
        pairs.push((act(lo), act(hi)));
    }
    PriorityOrder::new(pairs).map_err(|e| e.to_string())
}

impl CalcArgs {
    fn profile(&self) -> Result<CalculusProfile, String> {
        let env = parse_defs(&self.defs)?;
        let order = match &self.order {
            Some(o) => parse_order(o)?,
            None => PriorityOrder::empty(),
        };
        Ok(match self.calc {
            CalcKind::Ccs => CalculusProfile::Ccs { env },
            CalcKind::Pi => CalculusProfile::Pi,
            CalcKind::Pimpm => CalculusProfile::PiMpm,
            CalcKind::BccspTheta => CalculusProfile::BccspTheta { order },
            CalcKind::Cpg => CalculusProfile::Cpg { env },
            CalcKind::CcsSg => CalculusProfile::CcsSg { env },
            CalcKind::CcsPrio => CalculusProfile::CcsPrio { env },
            CalcKind::Cows => CalculusProfile::CowsFragment,
        })
    }
}

fn read_term(file: &Path, profile: &CalculusProfile) -> Result<Term, u8> {
    let src = fs::read_to_string(file)
        .map_err(|e| input_error(format_args!("cannot read {}: {e}", file.display())))?;
    parse_term(&src, profile).map_err(|e| {
        for d in e.diagnostics() {
            eprintln!("{}: {d}", file.display());
        }
        EXIT_INPUT
    })
}

fn trace_strings(v: &Verdict) -> Vec<String> {
    v.trace()
        .map(|t| t.iter().map(|s| s.label.to_string()).collect())
        .unwrap_or_default()
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Parse { file, calc } => {
            let profile = match calc.profile() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            match read_term(&file, &profile) {
                Ok(term) => {
                    println!("{term}");
                    EXIT_OK
                }
                Err(code) => code,
            }
        }
        Command::Lts {
            file,
            calc,
            bounds,
            format,
        } => {
            let profile = match calc.profile() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            let bounds = match bounds.resolve() {
                Ok(b) => b,
                Err(e) => return input_error(e),
            };
            let term = match read_term(&file, &profile) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let lts = match explore(&term, &profile, &bounds) {
                Ok(l) => l,
                Err(e) => return input_error(e),
            };
            match format {
                LtsFormat::Human => {
                    println!(
                        "states: {}  edges: {}  complete: {}",
                        lts.state_count(),
                        lts.edges.len(),
                        lts.complete
                    );
                    if let Some(bound) = lts.truncated_by {
                        println!("truncated by: {bound}");
                    }
                    for e in &lts.edges {
                        println!("  s{} --{}--> s{}", e.src, e.label, e.dst);
                    }
                    for (i, s) in lts.states.iter().enumerate() {
                        println!("  s{i} = {s}");
                    }
                }
                LtsFormat::Json => println!("{}", lts.to_json()),
                LtsFormat::Dot => print!("{}", lts.to_dot()),
            }
            EXIT_OK
        }
        Command::Visible {
            file,
            calc,
            bounds,
            json,
        } => {
            let profile = match calc.profile() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            let bounds = match bounds.resolve() {
                Ok(b) => b,
                Err(e) => return input_error(e),
            };
            let term = match read_term(&file, &profile) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let lts = match explore(&term, &profile, &bounds) {
                Ok(l) => l,
                Err(e) => return input_error(e),
            };
            let verdict = is_visible_lts(&lts);
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "verdict": match &verdict {
                            Verdict::Holds(_) => "visible",
                            Verdict::Fails => "invisible",
                            Verdict::Unknown(_) => "unknown",
                        },
                        "trace": trace_strings(&verdict),
                        "bound": match &verdict {
                            Verdict::Unknown(b) => Some(b.identifier()),
                            _ => None,
                        },
                    })
                );
            }
            match verdict {
                Verdict::Holds(_) => {
                    if !json {
                        println!("Visible");
                        println!("trace: {}", trace_strings(&verdict).join(", "));
                    }
                    EXIT_OK
                }
                Verdict::Fails => {
                    if !json {
                        println!("Invisible");
                    }
                    EXIT_NEGATIVE
                }
                Verdict::Unknown(b) => {
                    if !json {
                        println!("Unknown (hit {b})");
                    }
                    EXIT_UNKNOWN
                }
            }
        }
        Command::Sim {
            file_q,
            file_p,
            calc,
            bounds,
            k,
            fix: _,
            json,
        } => {
            let profile = match calc.profile() {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            let bounds = match bounds.resolve() {
                Ok(b) => b,
                Err(e) => return input_error(e),
            };
            let q = match read_term(&file_q, &profile) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let p = match read_term(&file_p, &profile) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let uni = Universe::for_terms(&[&q, &p]);
            let (lq, lp) = match (
                explore_with_universe(&q, &profile, &bounds, &uni),
                explore_with_universe(&p, &profile, &bounds, &uni),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return input_error(e),
            };
            let relation = match k {
                Some(k) => sim_k(&lq, &lp, k),
                None => sim_omega(&lq, &lp),
            };
            let relation = match relation {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_UNKNOWN;
                }
            };
            let holds = relation.contains_roots(&lq, &lp);
            let depth = if holds {
                None
            } else {
                distinguishing_depth(&lq, &lp).unwrap()
            };
            let moves: Vec<String> = if holds {
                Vec::new()
            } else {
                distinguishing_trace(&lq, &lp)
                    .unwrap()
                    .unwrap_or_default()
                    .iter()
                    .map(|l| l.to_string())
                    .collect()
            };
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "holds": holds,
                        "relation": relation.to_json(),
                        "distinguishing_depth": depth,
                        "distinguishing_moves": moves,
                    })
                );
            } else if holds {
                println!("holds ({})", relation.depth);
            } else {
                let mut line = format!("fails ({})", relation.depth);
                if let Some(d) = depth {
                    let _ = write!(line, "; distinguishing depth {d}");
                }
                if !moves.is_empty() {
                    let _ = write!(line, "; moves: {}", moves.join(", "));
                }
                println!("{line}");
            }
            if holds {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        Command::WitnessVerify { file, json } => {
            let case = match load_witness(&file) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let report = match verify_witness(&case) {
                Ok(r) => r,
                Err(e) => return input_error(e),
            };
            if json {
                println!("{}", report.to_json());
            } else {
                println!("id: {}", report.id);
                println!("invisible: {}", report.invisible_check);
                match report.closed_check {
                    Some(c) => println!("closed: {c}"),
                    None => println!("closed: n/a (strong mode)"),
                }
                let trace = trace_strings(&report.ci_visible);
                print!("C[I] visible: {}", report.ci_visible);
                if trace.is_empty() {
                    println!();
                } else {
                    println!("  trace: {}", trace.join(", "));
                }
                println!("C[P] visible: {}", report.cp_visible);
                println!(
                    "overall: {} (expected {})",
                    report.overall.key(),
                    case.expect.key()
                );
            }
            if report.overall.matches(case.expect) {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        Command::CorpusRun { dir, bounds, json } => {
            let overrides = match bounds.resolve_override() {
                Ok(o) => o,
                Err(e) => return input_error(e),
            };
            let summary = run_corpus(&dir, overrides);
            if json {
                println!("{}", summary.to_json());
            } else {
                println!("{:<14} {:<22} {:<14} match", "id", "overall", "expected");
                for r in &summary.rows {
                    println!(
                        "{:<14} {:<22} {:<14} {}",
                        r.id,
                        r.overall.key(),
                        r.expected.key(),
                        if r.matched { "yes" } else { "NO" }
                    );
                }
                for (f, e) in &summary.file_errors {
                    eprintln!("error: {}: {e}", f.display());
                }
                let matched = summary.rows.iter().filter(|r| r.matched).count();
                println!(
                    "{} case(s), {} matched, {} file error(s)",
                    summary.rows.len(),
                    matched,
                    summary.file_errors.len()
                );
            }
            if !summary.file_errors.is_empty() {
                EXIT_INPUT
            } else if summary.all_matched() && !summary.any_inconclusive() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        Command::Sample {
            calc,
            triples,
            seed,
            bounds,
        } => {
            let bounds = match bounds.resolve() {
                Ok(b) => b,
                Err(e) => return input_error(e),
            };
            sample_freeness(calc, triples, seed, &bounds)
        }
    }
}

/// Random freeness sampling: generate (C, I, P) with certified-invisible `I`,
/// then check the visibility transfer and the simulation root membership.
fn sample_freeness(calc: CalcKind, triples: usize, seed: u64, bounds: &ExplorationBounds) -> u8 {
    let (profile, weak) = match calc {
        CalcKind::Ccs => (CalculusProfile::ccs(), false),
        CalcKind::Pi => (CalculusProfile::Pi, false),
        CalcKind::Pimpm => (CalculusProfile::PiMpm, true),
        _ => return input_error("sample supports --calc ccs, pi or pimpm"),
    };
    let mut rng = rng_from_seed(seed);
    let mut done = 0usize;
    let mut visible_ci = 0usize;
    let mut skipped = 0usize;
    while done < triples {
        let (context, invisible, process) = match calc {
            CalcKind::Ccs => (
                gen_ccs_context(&mut rng, 3),
                gen_ccs_invisible(&mut rng, 3),
                gen_ccs_process(&mut rng, 3),
            ),
            CalcKind::Pi => {
                let opts = PiGenOptions::plain();
                (
                    gen_pi_context(&mut rng, 3, opts),
                    gen_pi_invisible(&mut rng, 3, opts),
                    gen_pi_process(&mut rng, 3, opts),
                )
            }
            _ => {
                let opts = PiGenOptions::full();
                (
                    gen_pi_context(&mut rng, 3, opts),
                    gen_pi_closed_invisible(&mut rng, 3, opts),
                    gen_pi_process(&mut rng, 3, opts),
                )
            }
        };
        if weak && !repfree_core::is_closed(&invisible).unwrap_or(false) {
            continue;
        }
        match repfree_core::is_invisible(&invisible, &profile, bounds) {
            Ok(v) if v.holds() => {}
            _ => continue,
        }
        let ci = plug(&context, std::slice::from_ref(&invisible)).unwrap();
        let cp = plug(&context, std::slice::from_ref(&process)).unwrap();
        let uni = Universe::for_terms(&[&ci, &cp]);
        let lci = match explore_with_universe(&ci, &profile, bounds, &uni) {
            Ok(l) => l,
            Err(e) => return input_error(e),
        };
        let lcp = match explore_with_universe(&cp, &profile, bounds, &uni) {
            Ok(l) => l,
            Err(e) => return input_error(e),
        };
        if !lci.complete || !lcp.complete {
            skipped += 1;
            continue;
        }
        let vi = is_visible_lts(&lci);
        let vp = is_visible_lts(&lcp);
        if vi.holds() && !vp.holds() {
            println!("counterexample found:");
            println!("  C = {context}");
            println!("  I = {invisible}");
            println!("  P = {process}");
            return EXIT_NEGATIVE;
        }
        let sim = sim_omega(&lci, &lcp).unwrap();
        if !sim.contains_roots(&lci, &lcp) {
            println!("simulation counterexample found:");
            println!("  C = {context}");
            println!("  I = {invisible}");
            println!("  P = {process}");
            return EXIT_NEGATIVE;
        }
        visible_ci += usize::from(vi.holds());
        done += 1;
    }
    println!(
        "sampled {done} triple(s) ({visible_ci} with visible C[I], {skipped} skipped at bounds): \
         no counterexample"
    );
    EXIT_OK
}
