//! Solver backend that runs an external DIMACS solver process per call.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;

use super::{Model, SatBackend, SolveOutcome};
use crate::cnf::{Lit, Var};
use crate::error::{Error, Result};

/// Re-submits the whole formula to `program` on every solve. Conflict limits are
/// not forwarded; pass solver-specific flags through `args` instead.
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args,
            num_vars: 0,
            clauses: Vec::new(),
        }
    }

    fn dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&l.to_dimacs().to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }
}

/// Parses competition-style solver output (`s` status line, `v` model lines).
pub(crate) fn parse_solver_output(text: &str, num_vars: usize) -> Result<SolveOutcome> {
    let mut status = None;
    let mut values = vec![false; num_vars];
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => return Ok(SolveOutcome::Unsat),
                "UNKNOWN" | "INDETERMINATE" => return Ok(SolveOutcome::Unknown),
                other => return Err(Error::ExternalSolver(format!("unexpected status {other:?}"))),
            });
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let value: i64 = tok
                    .parse()
                    .map_err(|_| Error::ExternalSolver(format!("bad model token {tok:?}")))?;
                if value == 0 {
                    continue;
                }
                let idx = value.unsigned_abs() as usize;
                if idx <= num_vars {
                    values[idx - 1] = value > 0;
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SolveOutcome::Sat(Model::new(values))),
        _ => Err(Error::ExternalSolver("no status line in solver output".into())),
    }
}

impl SatBackend for ExternalSolver {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var::new(self.num_vars)
    }

    fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            assert!(
                l.var().index() <= self.num_vars,
                "literal {l:?} refers to an unallocated variable"
            );
        }
        self.clauses.push(lits.to_vec());
    }

    fn solve(&mut self, _conflict_limit: Option<u64>) -> Result<SolveOutcome> {
        if self.clauses.iter().any(Vec::is_empty) {
            return Ok(SolveOutcome::Unsat);
        }
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::ExternalSolver(format!("cannot start {}: {e}", self.program)))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = self.dimacs();
        let writer = thread::spawn(move || {
            // The child may exit before reading everything; that is its choice.
            let _ = stdin.write_all(input.as_bytes());
        });
        let mut output = String::new();
        child.stdout.take().expect("piped stdout").read_to_string(&mut output)?;
        child.wait()?;
        let _ = writer.join();
        parse_solver_output(&output, self.num_vars())
    }

    fn last_conflicts(&self) -> u64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_status_and_model() {
        let out = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 4).unwrap();
        assert_eq!(out, SolveOutcome::Sat(Model::new(vec![true, false, true, false])));
        assert_eq!(
            parse_solver_output("s UNSATISFIABLE\n", 2).unwrap(),
            SolveOutcome::Unsat
        );
        assert_eq!(parse_solver_output("s UNKNOWN\n", 2).unwrap(), SolveOutcome::Unknown);
        assert!(parse_solver_output("garbage\n", 2).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn runs_a_process() {
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("fake-solver.sh");
        std::fs::write(
            &script,
            "#!/bin/sh\ncat > \"$(dirname \"$0\")/input.cnf\"\necho 's SATISFIABLE'\necho 'v -1 2 0'\n",
        )
        .unwrap();
        let mut s = ExternalSolver::new("sh", vec![script.display().to_string()]);
        let a = s.new_var();
        let b = s.new_var();
        s.add_clause(&[a.neg(), b.pos()]);
        let out = s.solve(None).unwrap();
        let m = out.model().unwrap();
        assert!(!m.value(a) && m.value(b));
        let seen = std::fs::read_to_string(dir.path().join("input.cnf")).unwrap();
        assert_eq!(seen, "p cnf 2 1\n-1 2 0\n");
    }

    #[test]
    fn missing_program_is_an_error() {
        let mut s = ExternalSolver::new("/nonexistent/solver-binary", vec![]);
        s.new_var();
        assert!(matches!(s.solve(None), Err(Error::ExternalSolver(_))));
    }
}
