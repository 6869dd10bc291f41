//! Synthesis engines.
//!
//! For a fixed term count `k` the question "does an ESOP with `k` terms realize
//! the function?" is answered either in one shot, with every care minterm
//! encoded up front, or by counterexample-guided refinement, which starts from
//! the empty candidate and only encodes minterms on which the current candidate
//! is wrong. [`search_minimum`] drives these per-size checks upward, downward or
//! at a single fixed size, and [`enumerate_all_minimum`] lists every distinct
//! form of a proven minimum size.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bfunc::IncompleteFunction;
use crate::cnf::{CnfBuilder, Lit};
use crate::encode::{
    add_minterm_constraints, decode_esop, forbid_contradictory_terms, make_csp, make_var_map, order_terms, EsopVarMap,
};
use crate::error::{Error, Result};
use crate::esop::EsopForm;
use crate::sat::{ExternalSolver, SatBackend, SolveOutcome, Solver, SolverConfig};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    Upward,
    Downward,
    Fixed,
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStrategy::Upward => "upward",
            SearchStrategy::Downward => "downward",
            SearchStrategy::Fixed => "fixed",
        })
    }
}

impl FromStr for SearchStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "upward" => Ok(SearchStrategy::Upward),
            "downward" => Ok(SearchStrategy::Downward),
            "fixed" => Ok(SearchStrategy::Fixed),
            other => Err(format!("unknown search strategy {other:?}")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SynthesisMode {
    /// Counterexample-guided refinement on one incremental solver per size.
    Cegar,
    /// All care minterms encoded before a single solver call.
    OneShot,
}

/// Which SAT solver answers the per-size queries.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum Backend {
    #[default]
    Embedded,
    External {
        program: String,
        args: Vec<String>,
    },
}

#[derive(Clone, Debug)]
pub struct SynthesisConfig {
    pub strategy: SearchStrategy,
    /// Largest term count considered.
    pub max_terms: usize,
    /// Per solver call; `None` is unlimited.
    pub conflict_limit: Option<u64>,
    pub mode: SynthesisMode,
    /// List every distinct minimum form once minimality is proven.
    pub enumerate_all: bool,
    /// Add clauses ruling out terms with both polarities of an input.
    pub forbid_contradictory: bool,
    /// Add lexicographic ordering constraints between consecutive terms,
    /// removing the `k!` term-permutation symmetry from the search.
    pub order_terms: bool,
    pub backend: Backend,
    pub seed: u64,
    /// Keep the clause set behind the reported form (for DIMACS dumps).
    pub keep_cnf: bool,
}

impl SynthesisConfig {
    /// Upward counterexample-guided search without a conflict limit.
    pub fn new(max_terms: usize) -> Self {
        SynthesisConfig {
            strategy: SearchStrategy::Upward,
            max_terms,
            conflict_limit: None,
            mode: SynthesisMode::Cegar,
            enumerate_all: false,
            forbid_contradictory: false,
            order_terms: false,
            backend: Backend::Embedded,
            seed: 0,
            keep_cnf: false,
        }
    }

    pub fn with_strategy(mut self, strategy: SearchStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_conflict_limit(mut self, limit: Option<u64>) -> Self {
        self.conflict_limit = limit;
        self
    }

    pub fn with_mode(mut self, mode: SynthesisMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_order_terms(mut self, on: bool) -> Self {
        self.order_terms = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::ZeroTerms);
        }
        if self.conflict_limit == Some(0) {
            return Err(Error::ZeroConflictLimit);
        }
        Ok(())
    }

    fn make_solver(&self) -> Result<Box<dyn SatBackend>> {
        Ok(match &self.backend {
            Backend::Embedded => Box::new(Solver::new(SolverConfig {
                conflict_limit: self.conflict_limit,
                seed: self.seed,
            })?),
            Backend::External { program, args } => Box::new(ExternalSolver::new(program.clone(), args.clone())),
        })
    }
}

/// Tri-state verdict for one term count.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SizeOutcome {
    Realized(EsopForm),
    Unsat,
    Unknown,
}

impl SizeOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            SizeOutcome::Realized(_) => Verdict::Sat,
            SizeOutcome::Unsat => Verdict::Unsat,
            SizeOutcome::Unknown => Verdict::Unknown,
        }
    }

    pub fn form(&self) -> Option<&EsopForm> {
        match self {
            SizeOutcome::Realized(f) => Some(f),
            _ => None,
        }
    }
}

/// Result of deciding one term count.
#[derive(Clone, Debug)]
pub struct SizeRun {
    pub outcome: SizeOutcome,
    pub solver_calls: u64,
    pub conflicts: u64,
    pub counterexamples: u64,
    /// The clause set as it stood at the end of the run.
    pub cnf: CnfBuilder,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SynthesisStatus {
    Realized,
    LimitExceeded,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Minimality {
    Proven,
    NotProven,
}

impl fmt::Display for Minimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Minimality::Proven => "proven",
            Minimality::NotProven => "not-proven",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SynthesisStats {
    pub solver_calls: u64,
    pub conflicts_total: u64,
    pub counterexamples: u64,
    pub per_k_outcomes: BTreeMap<usize, Verdict>,
    pub elapsed: Duration,
}

impl SynthesisStats {
    fn absorb(&mut self, k: usize, run: &SizeRun) {
        self.solver_calls += run.solver_calls;
        self.conflicts_total += run.conflicts;
        self.counterexamples += run.counterexamples;
        self.per_k_outcomes.insert(k, run.outcome.verdict());
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    /// One form, or every distinct minimum form when enumerating; empty on failure.
    pub forms: Vec<EsopForm>,
    pub status: SynthesisStatus,
    pub size_found: Option<usize>,
    pub minimality: Minimality,
    pub stats: SynthesisStats,
    /// Clause set behind the reported form, when requested.
    pub cnf: Option<CnfBuilder>,
}

impl SynthesisResult {
    pub fn form(&self) -> Option<&EsopForm> {
        self.forms.first()
    }
}

fn add_options(cnf: &mut CnfBuilder, map: &EsopVarMap, config: &SynthesisConfig) -> Result<()> {
    if config.forbid_contradictory {
        forbid_contradictory_terms(cnf, map)?;
    }
    if config.order_terms {
        order_terms(cnf, map)?;
    }
    Ok(())
}

fn sync_clauses(builder: &CnfBuilder, solver: &mut dyn SatBackend, synced: &mut usize) {
    solver.reserve_vars(builder.var_count());
    for c in &builder.clauses()[*synced..] {
        solver.add_clause(c.lits());
    }
    *synced = builder.clause_count();
}

/// Decides size `k` by encoding every care minterm and solving once.
pub fn synth_one_shot(spec: &IncompleteFunction, k: usize, config: &SynthesisConfig) -> Result<SizeRun> {
    let mut cnf = CnfBuilder::new();
    let (map, _) = make_csp(&mut cnf, spec, k)?;
    add_options(&mut cnf, &map, config)?;
    let mut solver = config.make_solver()?;
    sync_clauses(&cnf, solver.as_mut(), &mut 0);
    let outcome = match solver.solve(config.conflict_limit)? {
        SolveOutcome::Sat(model) => {
            let form = decode_esop(&model, &map);
            debug_assert!(form.realizes(spec), "decoded form violates the specification");
            SizeOutcome::Realized(form)
        }
        SolveOutcome::Unsat => SizeOutcome::Unsat,
        SolveOutcome::Unknown => SizeOutcome::Unknown,
    };
    Ok(SizeRun {
        outcome,
        solver_calls: 1,
        conflicts: solver.last_conflicts(),
        counterexamples: 0,
        cnf,
    })
}

/// Decides size `k` by counterexample-guided refinement.
///
/// Starting from the empty candidate, the smallest care minterm on which the
/// candidate is wrong is encoded and the solver is asked again, on the same
/// incremental instance, until the candidate is correct or the constraints
/// become unsatisfiable.
pub fn synth_cegar(spec: &IncompleteFunction, k: usize, config: &SynthesisConfig) -> Result<SizeRun> {
    let mut cnf = CnfBuilder::new();
    let map = make_var_map(&mut cnf, spec.num_vars(), k)?;
    add_options(&mut cnf, &map, config)?;
    let mut solver: Option<Box<dyn SatBackend>> = None;
    let mut synced = 0;
    let mut run = SizeRun {
        outcome: SizeOutcome::Unknown,
        solver_calls: 0,
        conflicts: 0,
        counterexamples: 0,
        cnf: CnfBuilder::new(),
    };
    let mut candidate = EsopForm::empty(spec.num_vars());
    run.outcome = loop {
        let Some(m) = candidate.first_counterexample(spec) else {
            break SizeOutcome::Realized(candidate);
        };
        run.counterexamples += 1;
        add_minterm_constraints(&mut cnf, &map, m, spec.value().bit(m))?;
        let solver = match &mut solver {
            Some(s) => s,
            None => solver.insert(config.make_solver()?),
        };
        sync_clauses(&cnf, solver.as_mut(), &mut synced);
        let out = solver.solve(config.conflict_limit)?;
        run.solver_calls += 1;
        run.conflicts += solver.last_conflicts();
        match out {
            SolveOutcome::Sat(model) => {
                candidate = decode_esop(&model, &map);
                debug_assert!(
                    candidate.eval(m) == spec.value().bit(m),
                    "counterexample {m} not fixed by the refined candidate"
                );
            }
            SolveOutcome::Unsat => break SizeOutcome::Unsat,
            SolveOutcome::Unknown => break SizeOutcome::Unknown,
        }
    };
    run.cnf = cnf;
    Ok(run)
}

/// Decides one size with the configured mode.
pub fn synth_size(spec: &IncompleteFunction, k: usize, config: &SynthesisConfig) -> Result<SizeRun> {
    match config.mode {
        SynthesisMode::Cegar => synth_cegar(spec, k, config),
        SynthesisMode::OneShot => synth_one_shot(spec, k, config),
    }
}

/// Searches for a smallest ESOP within `config.max_terms` terms.
///
/// Upward search returns the first satisfiable size, treating an unknown
/// verdict as "possibly unsatisfiable" and moving on. Downward search starts at
/// the term limit, keeps the smallest form found, treats unknown as "possibly
/// satisfiable" and stops at the first unsatisfiable size. Fixed search solves
/// the term limit only. Minimality is proven when the size below the reported
/// one was shown unsatisfiable (an unknown anywhere in that chain downgrades it).
pub fn search_minimum(spec: &IncompleteFunction, config: &SynthesisConfig) -> Result<SynthesisResult> {
    config.validate()?;
    let start = Instant::now();
    let mut stats = SynthesisStats::default();

    if spec.is_constant_zero_on_care() {
        stats.per_k_outcomes.insert(0, Verdict::Sat);
        stats.elapsed = start.elapsed();
        return Ok(SynthesisResult {
            forms: vec![EsopForm::empty(spec.num_vars())],
            status: SynthesisStatus::Realized,
            size_found: Some(0),
            minimality: Minimality::Proven,
            stats,
            cnf: None,
        });
    }

    let mut best: Option<(EsopForm, CnfBuilder)> = None;
    let mut last_cnf = None;
    let mut record = |k: usize,
                      run: SizeRun,
                      stats: &mut SynthesisStats,
                      best: &mut Option<(EsopForm, CnfBuilder)>,
                      reduce: bool| {
        stats.absorb(k, &run);
        match run.outcome {
            SizeOutcome::Realized(form) => {
                let form = if reduce { form.cancel_duplicates() } else { form };
                if best.as_ref().is_none_or(|(b, _)| form.len() < b.len()) {
                    *best = Some((form, run.cnf));
                }
                Verdict::Sat
            }
            other => {
                last_cnf = Some(run.cnf);
                other.verdict()
            }
        }
    };

    match config.strategy {
        SearchStrategy::Upward => {
            for k in 1..=config.max_terms {
                let run = synth_size(spec, k, config)?;
                if record(k, run, &mut stats, &mut best, true) == Verdict::Sat {
                    break;
                }
            }
        }
        SearchStrategy::Downward => {
            for k in (1..=config.max_terms).rev() {
                let run = synth_size(spec, k, config)?;
                if record(k, run, &mut stats, &mut best, true) == Verdict::Unsat {
                    break;
                }
            }
        }
        SearchStrategy::Fixed => {
            let k = config.max_terms;
            let run = synth_size(spec, k, config)?;
            record(k, run, &mut stats, &mut best, false);
        }
    }

    let Some((form, cnf)) = best else {
        stats.elapsed = start.elapsed();
        return Ok(SynthesisResult {
            forms: Vec::new(),
            status: SynthesisStatus::LimitExceeded,
            size_found: None,
            minimality: Minimality::NotProven,
            stats,
            cnf: if config.keep_cnf { last_cnf } else { None },
        });
    };
    debug_assert!(form.realizes(spec), "reported form violates the specification");

    let size = form.len();
    // Size 0 was excluded above, so a single term is minimal outright.
    let unsat_below = size <= 1
        || match config.strategy {
            SearchStrategy::Upward => (1..size).all(|k| stats.per_k_outcomes.get(&k) == Some(&Verdict::Unsat)),
            _ => stats.per_k_outcomes.get(&(size - 1)) == Some(&Verdict::Unsat),
        };
    let minimality = if unsat_below {
        Minimality::Proven
    } else {
        Minimality::NotProven
    };

    let forms = if config.enumerate_all && minimality == Minimality::Proven {
        enumerate_all_minimum(spec, size, config)?
    } else {
        vec![form]
    };
    stats.elapsed = start.elapsed();
    Ok(SynthesisResult {
        forms,
        status: SynthesisStatus::Realized,
        size_found: Some(size),
        minimality,
        stats,
        cnf: config.keep_cnf.then_some(cnf),
    })
}

/// Lists every distinct ESOP of size `k_min`, in canonical form and sorted.
///
/// `k_min` must be a proven minimum size: then no model contains duplicate or
/// contradictory terms, and each form corresponds to exactly `k_min!` models
/// (one per term order; a single one with [`SynthesisConfig::order_terms`]),
/// which are blocked one by one until the constraints become unsatisfiable.
pub fn enumerate_all_minimum(
    spec: &IncompleteFunction,
    k_min: usize,
    config: &SynthesisConfig,
) -> Result<Vec<EsopForm>> {
    if k_min == 0 {
        return if spec.is_constant_zero_on_care() {
            Ok(vec![EsopForm::empty(spec.num_vars())])
        } else {
            Err(Error::NotRealizable(0))
        };
    }
    let mut cnf = CnfBuilder::new();
    let (map, _) = make_csp(&mut cnf, spec, k_min)?;
    add_options(&mut cnf, &map, config)?;
    let mut solver = config.make_solver()?;
    sync_clauses(&cnf, solver.as_mut(), &mut 0);
    let selectors: Vec<_> = map.selectors().collect();
    let mut forms = BTreeSet::new();
    let mut first = true;
    loop {
        match solver.solve(None)? {
            SolveOutcome::Sat(model) => {
                let form = decode_esop(&model, &map).cancel_duplicates();
                debug_assert!(form.realizes(spec));
                forms.insert(form);
                let block: Vec<Lit> = selectors.iter().map(|&v| Lit::new(v, model.value(v))).collect();
                solver.add_clause(&block);
            }
            SolveOutcome::Unsat if first => return Err(Error::NotRealizable(k_min)),
            SolveOutcome::Unsat => break,
            SolveOutcome::Unknown => unreachable!("enumeration runs without a conflict limit"),
        }
        first = false;
    }
    Ok(forms.into_iter().collect())
}
