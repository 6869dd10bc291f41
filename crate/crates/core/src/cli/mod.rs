//! Command-line frontend and benchmark harness.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 term limit or conflict
//! budget exhausted without a form, 3 verification found a counterexample.

mod bench;
mod report;

pub use bench::{default_max_terms, npn4_functions, parse_function_list, random_functions, run_batch};
pub use report::{Aggregates, BatchReport, ParseFailure, RunRecord};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bfunc::{IncompleteFunction, TruthTable, MAX_VARS};
use crate::error::{Error, Result};
use crate::esop::EsopForm;
use crate::synth::{search_minimum, Backend, SearchStrategy, SynthesisConfig, SynthesisMode, SynthesisStatus, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "exact-esop",
    version,
    about = "Exact synthesis of minimum ESOP forms via SAT"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a minimum (or bounded-size) ESOP for one function.
    Synth(SynthArgs),
    /// Check an ESOP file against a function.
    Verify(VerifyArgs),
    /// Benchmark batches.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Truth table in hex; the leftmost digit holds the highest minterms.
    #[arg(long)]
    tt: String,
    /// Care set in hex (default: every minterm is a care minterm).
    #[arg(long)]
    care: Option<String>,
    /// Number of inputs.
    #[arg(long)]
    vars: usize,
}

impl FunctionArgs {
    fn spec(&self) -> Result<IncompleteFunction> {
        if self.vars > MAX_VARS {
            return Err(Error::TooManyVars(self.vars));
        }
        let value = TruthTable::parse_hex(&self.tt, self.vars)?;
        let care = match &self.care {
            Some(c) => TruthTable::parse_hex(c, self.vars)?,
            None => TruthTable::ones(self.vars)?,
        };
        IncompleteFunction::new(value, care)
    }
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Conflicts allowed per solver call (default: unlimited).
    #[arg(long)]
    conflict_limit: Option<u64>,
    /// Per-size procedure.
    #[arg(long, default_value = "cegar", value_parser = parse_mode)]
    mode: SynthesisMode,
    /// Order consecutive terms lexicographically (removes term-permutation
    /// symmetry; usually much faster when proving a size impossible).
    #[arg(long)]
    order_terms: bool,
    /// Seed for the solver's decision tie-breaking.
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    /// Use an external DIMACS solver instead of the embedded one.
    #[arg(long)]
    external_solver: Option<String>,
    /// Argument passed to the external solver (repeatable).
    #[arg(long = "solver-arg", allow_hyphen_values = true)]
    solver_args: Vec<String>,
}

impl SolverArgs {
    fn apply(&self, cfg: &mut SynthesisConfig) -> Result<()> {
        cfg.conflict_limit = self.conflict_limit;
        cfg.mode = self.mode;
        cfg.seed = self.solver_seed;
        cfg.order_terms = self.order_terms;
        if let Some(program) = &self.external_solver {
            cfg.backend = Backend::External {
                program: program.clone(),
                args: self.solver_args.clone(),
            };
        }
        cfg.validate()
    }
}

fn parse_mode(s: &str) -> std::result::Result<SynthesisMode, String> {
    match s {
        "cegar" => Ok(SynthesisMode::Cegar),
        "oneshot" => Ok(SynthesisMode::OneShot),
        other => Err(format!("unknown mode {other:?} (expected cegar or oneshot)")),
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// upward, downward or fixed.
    #[arg(long, default_value = "upward")]
    search: SearchStrategy,
    /// Largest number of terms (default: 2^vars).
    #[arg(long)]
    max_terms: Option<usize>,
    /// Report every distinct minimum form.
    #[arg(long)]
    all_minimum: bool,
    /// Write the form(s) as ESOP files instead of printing words; additional
    /// forms go to `<path>.1`, `<path>.2`, ...
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the clause set behind the result in DIMACS format.
    #[arg(long)]
    dump_cnf: Option<PathBuf>,
    /// Re-check every form by simulation (default).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    #[arg(long, overrides_with = "verify")]
    no_verify: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// ESOP file (PLA style, or whitespace-separated cube words).
    #[arg(long)]
    esop: PathBuf,
    #[command(flatten)]
    function: FunctionArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Write CSV rows here and the JSON aggregates to the same path with a
    /// `.json` extension (default: both to standard output).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// All 222 NPN classes of 4-input functions.
    Npn4 {
        #[arg(long)]
        all_minimum: bool,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Seeded random incompletely-specified functions.
    Random {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        terms: usize,
        #[arg(long, default_value = "upward")]
        search: SearchStrategy,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Functions listed one per line as `<hex> <vars> [<care-hex>]`.
    File {
        #[arg(long)]
        input: PathBuf,
        /// Term limit (default: 2^vars per function).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value = "upward")]
        search: SearchStrategy,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(b) => cmd_bench(&b),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })
}

fn numbered_path(base: &Path, i: usize) -> PathBuf {
    if i == 0 {
        base.to_path_buf()
    } else {
        let mut s = base.as_os_str().to_owned();
        s.push(format!(".{i}"));
        s.into()
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Sat => "sat",
        Verdict::Unsat => "unsat",
        Verdict::Unknown => "unknown",
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<i32> {
    let spec = a.function.spec()?;
    let max_terms = a.max_terms.unwrap_or_else(|| default_max_terms(spec.num_vars()));
    let mut cfg = SynthesisConfig::new(max_terms).with_strategy(a.search);
    cfg.enumerate_all = a.all_minimum;
    cfg.keep_cnf = a.dump_cnf.is_some();
    a.solver.apply(&mut cfg)?;

    let result = search_minimum(&spec, &cfg)?;

    let per_k: Vec<String> = result
        .stats
        .per_k_outcomes
        .iter()
        .map(|(k, v)| format!("{k}:{}", verdict_name(*v)))
        .collect();
    eprintln!(
        "solver_calls={} conflicts={} counterexamples={} per_k={} ms={:.3}",
        result.stats.solver_calls,
        result.stats.conflicts_total,
        result.stats.counterexamples,
        per_k.join(","),
        result.stats.elapsed.as_secs_f64() * 1e3
    );
    if let (Some(path), Some(cnf)) = (&a.dump_cnf, &result.cnf) {
        std::fs::write(path, cnf.to_dimacs())?;
    }

    if result.status == SynthesisStatus::LimitExceeded {
        println!("no ESOP found within {max_terms} terms");
        return Ok(EXIT_LIMIT);
    }
    if !a.no_verify {
        for f in &result.forms {
            if let Some(m) = f.first_counterexample(&spec) {
                eprintln!("verification failed: {} differs at minterm {m}", f.print_words());
                return Ok(EXIT_COUNTEREXAMPLE);
            }
        }
    }
    match &a.out {
        Some(path) => {
            for (i, f) in result.forms.iter().enumerate() {
                f.write_file(numbered_path(path, i))?;
            }
        }
        None => {
            for f in &result.forms {
                println!("{}", f.print_words());
            }
        }
    }
    if a.all_minimum {
        println!("forms={}", result.forms.len());
    }
    println!(
        "k={} minimality={}",
        result.size_found.expect("realized result has a size"),
        result.minimality
    );
    Ok(EXIT_OK)
}

fn read_esop(path: &Path, num_vars: usize) -> Result<EsopForm> {
    let text = std::fs::read_to_string(path)?;
    let is_pla = text.lines().any(|l| l.trim_start().starts_with('.'));
    let form = if is_pla {
        EsopForm::from_pla(&text)?
    } else {
        let words: Vec<&str> = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect();
        EsopForm::parse_words(&words.join(" "))?
    };
    // An empty form carries no width of its own.
    if form.is_empty() {
        return Ok(EsopForm::empty(num_vars));
    }
    if form.num_vars() != num_vars {
        return Err(Error::VarCountMismatch(form.num_vars(), num_vars));
    }
    Ok(form)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let spec = a.function.spec()?;
    let form = read_esop(&a.esop, spec.num_vars())?;
    match form.first_counterexample(&spec) {
        None => {
            println!("ok: {} terms realize the function", form.len());
            Ok(EXIT_OK)
        }
        Some(m) => {
            println!(
                "counterexample: minterm {m} (expected {}, got {})",
                spec.value().bit(m) as u8,
                form.eval(m) as u8
            );
            Ok(EXIT_COUNTEREXAMPLE)
        }
    }
}

fn emit_report(report: &BatchReport, args: &ReportArgs) -> Result<()> {
    match &args.report {
        Some(path) => {
            let json = report.write_files(path)?;
            eprintln!("wrote {} and {}", path.display(), json.display());
            println!("{}", report.json_string());
        }
        None => {
            print!("{}", report.csv_string());
            println!("{}", report.json_string());
        }
    }
    Ok(())
}

fn cmd_bench(cmd: &BenchCommand) -> Result<i32> {
    let report = match cmd {
        BenchCommand::Npn4 {
            all_minimum,
            report: _,
            solver,
        } => {
            let mut cfg = SynthesisConfig::new(default_max_terms(4));
            cfg.enumerate_all = *all_minimum;
            solver.apply(&mut cfg)?;
            run_batch(&npn4_functions(), &cfg, None)?
        }
        BenchCommand::Random {
            vars,
            count,
            seed,
            terms,
            search,
            report: _,
            solver,
        } => {
            let mut cfg = SynthesisConfig::new(*terms).with_strategy(*search);
            solver.apply(&mut cfg)?;
            run_batch(&random_functions(*vars, *count, *seed)?, &cfg, Some(*terms))?
        }
        BenchCommand::File {
            input,
            terms,
            search,
            report: _,
            solver,
        } => {
            let mut cfg = SynthesisConfig::new(terms.unwrap_or(1)).with_strategy(*search);
            solver.apply(&mut cfg)?;
            let (specs, failures) = parse_function_list(&std::fs::read_to_string(input)?);
            for f in &failures {
                eprintln!("{}:{}: {}", input.display(), f.line, f.message);
            }
            let mut report = run_batch(&specs, &cfg, *terms)?;
            report.parse_failures = failures;
            report
        }
    };
    let (BenchCommand::Npn4 { report: args, .. }
    | BenchCommand::Random { report: args, .. }
    | BenchCommand::File { report: args, .. }) = cmd;
    emit_report(&report, args)?;
    Ok(EXIT_OK)
}
