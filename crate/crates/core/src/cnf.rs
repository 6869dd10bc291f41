//! Propositional variables, literals and clause construction.

use std::fmt;
use std::io::{self, Write};
use std::ops::Not;

use crate::error::{Error, Result};

/// A propositional variable; indices start at 1 as in DIMACS.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    ///
    /// Panics if `index` is 0.
    pub fn new(index: u32) -> Self {
        assert!(index > 0, "variable indices start at 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// 0-based position, for indexing per-variable arrays.
    #[inline]
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A variable or its negation, packed as `2 * slot + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Self {
        Lit((var.slot() as u32) << 1 | negated as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense code usable as an array index.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().index() as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Lit::new(Var(value.unsigned_abs() as u32), value < 0))
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A nonempty disjunction over distinct variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Removes repeated literals; rejects empty and tautological input.
    pub fn new(lits: &[Lit]) -> Result<Self> {
        if lits.is_empty() {
            return Err(Error::EmptyClause);
        }
        let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            if out.contains(&!l) {
                return Err(Error::Tautology(l.var().index()));
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Ok(Clause(out))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Accumulates a clause set with densely allocated variables.
#[derive(Clone, Default, Debug)]
pub struct CnfBuilder {
    var_count: u32,
    clauses: Vec<Clause>,
}

impl CnfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self) -> Var {
        self.var_count += 1;
        Var(self.var_count)
    }

    pub fn var_count(&self) -> usize {
        self.var_count as usize
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<()> {
        if let Some(l) = lits.iter().find(|l| l.var().index() > self.var_count) {
            return Err(Error::UnallocatedVar {
                var: l.var().index(),
                allocated: self.var_count,
            });
        }
        self.clauses.push(Clause::new(lits)?);
        Ok(())
    }

    /// Adds clauses forcing `lits[0] ^ ... ^ lits[k-1] = parity`.
    ///
    /// For even parity the last literal is complemented. The working list is then
    /// folded left: the first two literals `a`, `b` are replaced by a fresh `u`
    /// defined as `a ^ b` through four ternary clauses, until one literal remains,
    /// which is asserted as a unit. Returns the fresh variables, `k - 1` of them;
    /// exactly `4(k - 1) + 1` clauses are added.
    pub fn translate_xor(&mut self, lits: &[Lit], parity: bool) -> Result<Vec<Var>> {
        if lits.is_empty() {
            return Err(Error::EmptyClause);
        }
        for (i, l) in lits.iter().enumerate() {
            if lits[..i].iter().any(|o| o.var() == l.var()) {
                return Err(Error::DuplicateXorVar(l.var().index()));
            }
            if l.var().index() > self.var_count {
                return Err(Error::UnallocatedVar {
                    var: l.var().index(),
                    allocated: self.var_count,
                });
            }
        }
        let mut work = lits.to_vec();
        if !parity {
            let last = work.len() - 1;
            work[last] = !work[last];
        }
        let mut fresh = Vec::with_capacity(work.len() - 1);
        let mut acc = work[0];
        for &b in &work[1..] {
            let a = acc;
            let u = self.new_var().pos();
            self.add_clause(&[!a, !b, !u])?;
            self.add_clause(&[a, b, !u])?;
            self.add_clause(&[a, !b, u])?;
            self.add_clause(&[!a, b, u])?;
            fresh.push(u.var());
            acc = u;
        }
        self.add_clause(&[acc])?;
        Ok(fresh)
    }

    /// Writes the clause set in DIMACS CNF.
    pub fn write_dimacs<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "p cnf {} {}", self.var_count, self.clauses.len())?;
        for c in &self.clauses {
            for l in c.lits() {
                write!(sink, "{} ", l.to_dimacs())?;
            }
            writeln!(sink, "0")?;
        }
        Ok(())
    }

    pub fn to_dimacs(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Parses DIMACS CNF. Tautological clauses are dropped since they constrain nothing.
    pub fn read_dimacs(text: &str) -> Result<CnfBuilder> {
        let err = |line: usize, message: &str| Error::Dimacs {
            line,
            message: message.to_string(),
        };
        let mut builder = CnfBuilder::new();
        let mut header: Option<(u32, usize)> = None;
        let mut current: Vec<Lit> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, c] => {
                        let v = v.parse().map_err(|_| err(line_no, "bad variable count"))?;
                        let c = c.parse().map_err(|_| err(line_no, "bad clause count"))?;
                        header = Some((v, c));
                        builder.var_count = v;
                    }
                    _ => return Err(err(line_no, "malformed problem line")),
                }
                continue;
            }
            if header.is_none() {
                return Err(err(line_no, "clause before problem line"));
            }
            for tok in line.split_whitespace() {
                let value: i64 = tok.parse().map_err(|_| err(line_no, "bad literal"))?;
                if value == 0 {
                    match Clause::new(&current) {
                        Ok(c) => builder.clauses.push(c),
                        Err(Error::Tautology(_)) => {}
                        Err(_) => return Err(err(line_no, "empty clause")),
                    }
                    current.clear();
                } else {
                    let lit = Lit::from_dimacs(value).ok_or_else(|| err(line_no, "bad literal"))?;
                    if lit.var().index() > builder.var_count {
                        return Err(err(line_no, "literal exceeds declared variable count"));
                    }
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            return Err(err(text.lines().count(), "unterminated clause"));
        }
        if header.is_none() {
            return Err(err(0, "missing problem line"));
        }
        Ok(builder)
    }
}
