//! SAT-based exact synthesis of ESOP (exclusive-or sum-of-products) forms.
//!
//! The crate is organized bottom-up:
//!
//! - [`bfunc`]: explicit truth tables for completely- and incompletely-specified functions.
//! - [`esop`]: cubes, ESOP forms, simulation and the PLA-style file format.
//! - [`cnf`]: variables, literals, clause construction and XOR-to-CNF translation.
//! - [`sat`]: the incremental solver contract with an embedded CDCL engine.
//! - [`encode`]: the constraint system for "an ESOP with `k` terms exists" and model decoding.
//! - [`synth`]: one-shot and counterexample-guided synthesis, size search and enumeration.
//! - [`cli`]: command-line frontend and benchmark harness.

pub mod bfunc;
pub mod cli;
pub mod cnf;
pub mod encode;
pub mod error;
pub mod esop;
pub mod sat;
pub mod synth;

pub use bfunc::{IncompleteFunction, TruthTable, MAX_VARS};
pub use cnf::{CnfBuilder, Lit, Var};
pub use error::{Error, Result};
pub use esop::{Cube, EsopForm, Trit};
pub use sat::{Model, SatBackend, SolveOutcome, Solver, SolverConfig};
pub use synth::{
    Minimality, SearchStrategy, SynthesisConfig, SynthesisMode, SynthesisResult, SynthesisStats, SynthesisStatus,
};
