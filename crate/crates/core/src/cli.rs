//! The `mck` command line.
//!
//! Exit status: 0 success, 1 negative result (not provable, invalid, not
//! equal), 2 usage or parse error, 3 internal invariant breach.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arena::{arena_of_sequent, RenderFormat};
use crate::correspond::{roundtrip_term, strategy_of_term, term_of_strategy, CorrespondError};
use crate::corpus::{generate_terms, run_suites, GenConfig};
use crate::fck::{fck_check, fck_derive, FckError};
use crate::games::{ck_report, search_ck_wis, SearchOutcome, DEFAULT_MAX_VIEWS};
use crate::rewrite::{eta_measure, find_redexes, kappa_measure, normalize, NormStrategy, RewriteError, DEFAULT_MAX_STEPS};
use crate::sck::{check_sck, prove, ProveOutcome, Sequent, DEFAULT_DEPTH};
use crate::surface::{parse_formula, parse_sequent, print_assignment, print_term, strategy_from_json, strategy_to_json, ParsedSequent};
use crate::syntax::{tidy_names, Formula, Term};
use crate::typing::{infer_type, TypeError};

#[derive(Parser, Debug)]
#[command(name = "mck", version, about = "Modal lambda terms, focused derivations and CK strategies")]
pub struct Cli {
    /// Read the main input from a file instead of the command line.
    #[arg(long, global = true, value_name = "PATH")]
    pub file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Type-check `ctx |- M : A` and print the derivation.
    Check { input: Option<String> },
    /// Normalize a typed term.
    Normalize {
        input: Option<String>,
        /// leftmost, rightmost or random=SEED
        #[arg(long, default_value = "leftmost")]
        strategy: NormStrategy,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Print the normal form only.
    Nf { input: Option<String> },
    /// List the redexes of a typed term.
    Redexes { input: Option<String> },
    /// Print the η and κ measures.
    Measures { input: Option<String> },
    /// Canonical focused derivation of a normal term.
    Fck {
        input: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Arena of a sequent `A1, ..., An |- C` or of a single formula.
    Arena {
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Strategy (json) of a typed term, after normalization.
    Strat { input: Option<String> },
    /// Term of a strategy.
    Unstrat {
        input: Option<String>,
        /// Strategy json file, `-` for stdin.
        #[arg(long, short, value_name = "PATH")]
        strategy: String,
    },
    /// Term to strategy and back.
    Roundtrip {
        input: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Check a strategy against a sequent.
    ValidateStrategy {
        input: Option<String>,
        /// Strategy json file, `-` for stdin.
        #[arg(long, short, value_name = "PATH")]
        strategy: String,
    },
    /// Bounded proof search in the sequent calculus.
    Prove {
        input: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Search for a CK winning innocent strategy.
    SearchWis {
        input: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_VIEWS)]
        max_views: usize,
    },
    /// Run the property suites over generated terms.
    Corpus {
        #[arg(long, default_value_t = 12)]
        size: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Dot,
    Json,
    Text,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn negative(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn internal(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: format!("internal error: {}", message.into()) }
}

fn type_failure(e: TypeError) -> Failure {
    negative(format!("type error: {e}"))
}

fn rewrite_failure(e: RewriteError) -> Failure {
    match e {
        RewriteError::Type(e) => type_failure(e),
        RewriteError::StepBudgetExceeded(_) => negative(e.to_string()),
        RewriteError::IllegalRedex(_) => internal(e.to_string()),
    }
}

fn correspond_failure(e: CorrespondError) -> Failure {
    match e {
        CorrespondError::Fck(FckError::Type(e)) => type_failure(e),
        CorrespondError::NotCkWis(_) | CorrespondError::TrivialStrategy | CorrespondError::Fck(FckError::NotNormal(_)) => {
            negative(e.to_string())
        }
        _ => internal(e.to_string()),
    }
}

struct Io<'a> {
    file: Option<PathBuf>,
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    fn main_input(&self, inline: Option<String>) -> Result<String, Failure> {
        match (inline, &self.file) {
            (Some(s), None) => Ok(s),
            (None, Some(p)) => std::fs::read_to_string(p)
                .map(|s| s.trim().to_string())
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display()))),
            (Some(_), Some(_)) => Err(usage("give the input inline or with --file, not both")),
            (None, None) => Err(usage("missing input")),
        }
    }

    fn strategy_input(&mut self, source: &str) -> Result<String, Failure> {
        if source == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| usage(format!("cannot read stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(source).map_err(|e| usage(format!("cannot read {source}: {e}")))
        }
    }
}

fn sequent(input: &str) -> Result<ParsedSequent, Failure> {
    parse_sequent(input).map_err(|e| usage(e.render(input)))
}

fn typed(input: &str) -> Result<(ParsedSequent, Term), Failure> {
    let p = sequent(input)?;
    let t = p.term.clone().ok_or_else(|| usage("expected a typed term `ctx |- M : A`"))?;
    let ty = crate::typing::type_of(&p.context, &t).map_err(type_failure)?;
    if ty != p.goal {
        return Err(type_failure(TypeError::TypeMismatch { expected: p.goal.to_string(), found: ty.to_string() }));
    }
    Ok((p, t))
}

/// Hypotheses and goal of a sequent without term, or of a lone formula.
fn bare_sequent(input: &str) -> Result<(Vec<Formula>, Formula), Failure> {
    if !input.contains("|-") && !input.contains('⊢') {
        let f = parse_formula(input).map_err(|e| usage(e.render(input)))?;
        return Ok((vec![], f));
    }
    let p = sequent(input)?;
    if p.term.is_some() {
        return Err(usage("expected a sequent without term, `A1, ..., An |- C`"));
    }
    Ok((p.context.types(), p.goal))
}

fn execute(cli: Cli, io: &mut Io, out: &mut dyn Write) -> Result<(), Failure> {
    let mut w = |s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cli.command {
        Command::Check { input } => {
            let input = io.main_input(input)?;
            let p = sequent(&input)?;
            let t = p.term.ok_or_else(|| usage("expected a term"))?;
            let (ty, d) = infer_type(&p.context, &t).map_err(type_failure)?;
            if ty != p.goal {
                return Err(type_failure(TypeError::TypeMismatch { expected: p.goal.to_string(), found: ty.to_string() }));
            }
            w(d.render().trim_end().to_string());
        }
        Command::Normalize { input, strategy, trace, max_steps } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let (n, tr) = normalize(&p.context, &t, strategy, max_steps).map_err(rewrite_failure)?;
            if trace {
                w(tr.render().trim_end().to_string());
            } else {
                w(print_assignment(&p.context, &tidy_names(&n, &p.context.names()), &p.goal));
            }
        }
        Command::Nf { input } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let (n, _) = normalize(&p.context, &t, NormStrategy::Leftmost, DEFAULT_MAX_STEPS).map_err(rewrite_failure)?;
            w(print_term(&tidy_names(&n, &p.context.names())));
        }
        Command::Redexes { input } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let t = crate::syntax::canonicalize_avoiding(&t, &p.context.names());
            for r in find_redexes(&p.context, &t).map_err(type_failure)? {
                w(r.describe());
            }
        }
        Command::Measures { input } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let (e1, e2) = eta_measure(&p.context, &t).map_err(type_failure)?;
            w(format!("eta1 {e1}\neta2 {e2}\nkappa {}", kappa_measure(&t)));
        }
        Command::Fck { input, json } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let d = fck_derive(&p.context, &t).map_err(|e| match e {
                FckError::NotNormal(_) => negative(e.to_string()),
                FckError::Type(e) => type_failure(e),
            })?;
            fck_check(&d).map_err(|v| internal(format!("derivation fails its own check: {v:?}")))?;
            if json {
                w(serde_json::to_string_pretty(&d.to_json()).unwrap());
            } else {
                w(d.render().trim_end().to_string());
            }
        }
        Command::Arena { input, format } => {
            let (hyps, goal) = bare_sequent(&io.main_input(input)?)?;
            let f = match format {
                Format::Dot => RenderFormat::Dot,
                Format::Json => RenderFormat::Json,
                Format::Text => RenderFormat::Text,
            };
            w(arena_of_sequent(&hyps, &goal).render(f).trim_end().to_string());
        }
        Command::Strat { input } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let (n, _) = normalize(&p.context, &t, NormStrategy::Leftmost, DEFAULT_MAX_STEPS).map_err(rewrite_failure)?;
            let s = strategy_of_term(&p.context, &n).map_err(correspond_failure)?;
            w(strategy_to_json(&Formula::curried(&p.context.types(), p.goal.clone()), &s));
        }
        Command::Unstrat { input, strategy } => {
            let (hyps, goal) = bare_sequent(&io.main_input(input)?)?;
            let (f, s) = strategy_from_json(&io.strategy_input(&strategy)?).map_err(|e| usage(e.to_string()))?;
            if f != Formula::curried(&hyps, goal.clone()) {
                return Err(usage("the strategy's arena formula does not match the sequent"));
            }
            let (t, d) = term_of_strategy(&hyps, &goal, &s).map_err(correspond_failure)?;
            w(print_assignment(&d.conclusion.context, &t, &goal));
        }
        Command::Roundtrip { input, json } => {
            let (p, t) = typed(&io.main_input(input)?)?;
            let (n, _) = normalize(&p.context, &t, NormStrategy::Leftmost, DEFAULT_MAX_STEPS).map_err(rewrite_failure)?;
            let r = roundtrip_term(&p.context, &n).map_err(correspond_failure)?;
            if json {
                w(serde_json::to_string_pretty(&r.to_json()).unwrap());
            } else if r.roundtrip_ok {
                w(format!("roundtrip_ok: {}", print_term(&r.term)));
            } else {
                w(format!("roundtrip differs: {}", r.diff.clone().unwrap_or_default()));
            }
            if !r.roundtrip_ok {
                return Err(negative("round trip is not the identity"));
            }
        }
        Command::ValidateStrategy { input, strategy } => {
            let (hyps, goal) = bare_sequent(&io.main_input(input)?)?;
            let (f, s) = strategy_from_json(&io.strategy_input(&strategy)?).map_err(|e| usage(e.to_string()))?;
            if f != Formula::curried(&hyps, goal.clone()) {
                return Err(usage("the strategy's arena formula does not match the sequent"));
            }
            let r = ck_report(&arena_of_sequent(&hyps, &goal), &s);
            w(format!("wis: {}\nwell-batched: {}\nlinked: {}", r.wis, r.well_batched, r.linked));
            for p in &r.problems {
                w(format!("  {p}"));
            }
            if !r.ok() {
                return Err(negative("not a CK-WIS"));
            }
        }
        Command::Prove { input, depth } => {
            let (hyps, goal) = bare_sequent(&io.main_input(input)?)?;
            match prove(&Sequent::new(hyps, goal), depth) {
                ProveOutcome::Proved(d) => {
                    check_sck(&d).map_err(|v| internal(format!("derivation fails its own check: {v:?}")))?;
                    w(d.render().trim_end().to_string());
                }
                ProveOutcome::Exhausted => return Err(negative("not provable (exhausted)")),
                ProveOutcome::BoundExceeded => return Err(negative(format!("not provable within depth {depth} (bound exceeded)"))),
            }
        }
        Command::SearchWis { input, max_views } => {
            let (hyps, goal) = bare_sequent(&io.main_input(input)?)?;
            match search_ck_wis(&arena_of_sequent(&hyps, &goal), max_views) {
                SearchOutcome::Found(s) => w(strategy_to_json(&Formula::curried(&hyps, goal), &s)),
                SearchOutcome::Exhausted => return Err(negative("none (exhausted)")),
                SearchOutcome::BoundExceeded => return Err(negative(format!("none within {max_views} views (bound exceeded)"))),
            }
        }
        Command::Corpus { size, count, seed } => {
            let cfg = GenConfig { max_size: size, ..GenConfig::default() };
            let terms = generate_terms(seed, count, &cfg);
            w(format!("{} terms (seed {seed}, size <= {size})", terms.len()));
            let results = run_suites(&terms);
            for r in &results {
                let status = if r.ok() { "ok" } else { "FAIL" };
                w(format!("{status:4} {} ({} checked, {} failed)", r.name, r.checked, r.failures.len()));
                for f in r.failures.iter().take(3) {
                    w(format!("       {f}"));
                }
            }
            if results.iter().any(|r| !r.ok()) {
                return Err(negative("some properties failed"));
            }
        }
    }
    Ok(())
}

/// Runs one invocation; returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { file: cli.file.clone(), stdin };
    match execute(cli, &mut io, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}
