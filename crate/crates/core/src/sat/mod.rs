//! Incremental SAT solving with per-call conflict budgets.
//!
//! [`SatBackend`] is the contract the synthesis engines rely on. [`Solver`] is
//! the embedded CDCL engine; [`ExternalSolver`] pipes the formula to a
//! DIMACS-reading solver process on every call.

mod cdcl;
mod external;
mod heap;

pub use cdcl::Solver;
pub use external::ExternalSolver;

use crate::cnf::{Lit, Var};
use crate::error::{Error, Result};

/// A total assignment, indexed by variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model(values)
    }

    /// # Panics
    ///
    /// Panics if `var` was not allocated when the model was produced.
    pub fn value(&self, var: Var) -> bool {
        self.0[var.slot()]
    }

    pub fn lit_value(&self, lit: Lit) -> bool {
        self.value(lit.var()) != lit.is_negated()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// True iff every clause has a literal true under the model.
    pub fn satisfies<'a>(&self, clauses: impl IntoIterator<Item = &'a [Lit]>) -> bool {
        clauses.into_iter().all(|c| c.iter().any(|&l| self.lit_value(l)))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    /// The conflict budget ran out before a verdict.
    Unknown,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveOutcome::Sat(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SolverConfig {
    /// Default per-call conflict budget; `None` means unlimited.
    pub conflict_limit: Option<u64>,
    /// Seeds the tie-breaking of the decision heuristic.
    pub seed: u64,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.conflict_limit == Some(0) {
            return Err(Error::ZeroConflictLimit);
        }
        Ok(())
    }
}

/// An incremental SAT solver.
///
/// Clauses may be added between [`SatBackend::solve`] calls and stay part of the
/// formula for all later calls.
pub trait SatBackend {
    fn new_var(&mut self) -> Var;

    fn num_vars(&self) -> usize;

    /// Adds a clause over allocated variables. An empty clause makes the
    /// formula permanently unsatisfiable.
    fn add_clause(&mut self, lits: &[Lit]);

    /// Decides the current formula. `conflict_limit` overrides the configured
    /// default budget for this call only; a budget of 0 behaves like 1.
    fn solve(&mut self, conflict_limit: Option<u64>) -> Result<SolveOutcome>;

    /// Conflicts spent in the most recent `solve` call.
    fn last_conflicts(&self) -> u64;

    /// Allocates variables until at least `count` exist.
    fn reserve_vars(&mut self, count: usize) {
        while self.num_vars() < count {
            self.new_var();
        }
    }
}
