//! Clause encoding of "an ESOP with `k` terms realizes these minterms".
//!
//! Term `j` owns two selector variables per input: `p[j][l]` puts `x_l` into the
//! term and `q[j][l]` puts its complement. Every constrained minterm gets `k`
//! fresh indicator variables `z_j` that equal the value of term `j` at that
//! minterm, plus an XOR constraint tying their parity to the required output.

use crate::bfunc::IncompleteFunction;
use crate::cnf::{CnfBuilder, Lit, Var};
use crate::error::{Error, Result};
use crate::esop::{Cube, EsopForm, Trit};
use crate::sat::Model;

/// The term selector variables of one constraint system.
#[derive(Clone, Debug)]
pub struct EsopVarMap {
    num_vars: usize,
    num_terms: usize,
    p: Vec<Var>,
    q: Vec<Var>,
}

impl EsopVarMap {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }

    /// Selector for `x_{l+1}` in term `j` (both 0-based).
    pub fn p(&self, j: usize, l: usize) -> Var {
        self.p[j * self.num_vars + l]
    }

    /// Selector for the complement of `x_{l+1}` in term `j`.
    pub fn q(&self, j: usize, l: usize) -> Var {
        self.q[j * self.num_vars + l]
    }

    /// All `2nk` selector variables, `p` block first.
    pub fn selectors(&self) -> impl Iterator<Item = Var> + '_ {
        self.p.iter().chain(self.q.iter()).copied()
    }
}

/// The per-minterm variables introduced by [`add_minterm_constraints`].
#[derive(Clone, Debug)]
pub struct AssignmentBlock {
    pub minterm: usize,
    pub output: bool,
    pub z: Vec<Var>,
    pub tseitin: Vec<Var>,
}

/// Allocates the `2nk` selector variables: all `p[j][l]`, then all `q[j][l]`.
pub fn make_var_map(builder: &mut CnfBuilder, num_vars: usize, num_terms: usize) -> Result<EsopVarMap> {
    if num_terms == 0 {
        return Err(Error::ZeroTerms);
    }
    let size = num_vars * num_terms;
    let p = (0..size).map(|_| builder.new_var()).collect();
    let q = (0..size).map(|_| builder.new_var()).collect();
    Ok(EsopVarMap {
        num_vars,
        num_terms,
        p,
        q,
    })
}

/// Forbids terms containing both `x_l` and its complement.
pub fn forbid_contradictory_terms(builder: &mut CnfBuilder, map: &EsopVarMap) -> Result<()> {
    for j in 0..map.num_terms {
        for l in 0..map.num_vars {
            builder.add_clause(&[map.p(j, l).neg(), map.q(j, l).neg()])?;
        }
    }
    Ok(())
}

/// Requires the selector vectors of consecutive terms to be lexicographically
/// non-decreasing, so each multiset of terms has a single ordering.
///
/// Terms are compared on `(p_1, q_1, …, p_n, q_n)` with false < true. Per pair
/// of terms this adds `2n − 1` "equal so far" variables and `3·2n − 2` clauses.
/// Every ESOP stays representable (duplicates included), so satisfiability at
/// each size is unchanged.
pub fn order_terms(builder: &mut CnfBuilder, map: &EsopVarMap) -> Result<()> {
    let vector = |j: usize| -> Vec<Var> { (0..map.num_vars).flat_map(|l| [map.p(j, l), map.q(j, l)]).collect() };
    for j in 1..map.num_terms {
        let (a, b) = (vector(j - 1), vector(j));
        // `None` stands for the constant-true "prefix equal" flag of position 0.
        let mut equal: Option<Var> = None;
        for i in 0..a.len() {
            let guard: Vec<Lit> = equal.map(|e| e.neg()).into_iter().collect();
            builder.add_clause(&[&guard[..], &[a[i].neg(), b[i].pos()]].concat())?;
            if i + 1 < a.len() {
                let next = builder.new_var();
                builder.add_clause(&[&guard[..], &[a[i].pos(), b[i].pos(), next.pos()]].concat())?;
                builder.add_clause(&[&guard[..], &[a[i].neg(), b[i].neg(), next.pos()]].concat())?;
                equal = Some(next);
            }
        }
    }
    Ok(())
}

/// Constrains the ESOP to output `output` at `minterm`.
///
/// Adds `k·n` clauses `(¬z_j ∨ ¬q[j][l])` / `(¬z_j ∨ ¬p[j][l])` (depending on
/// whether `x_l` is 1 or 0 in the minterm), then `k` clauses
/// `(z_j ∨ ⋁_l q[j][l] / p[j][l])`, then the XOR of the `z_j` equal to `output`.
pub fn add_minterm_constraints(
    builder: &mut CnfBuilder,
    map: &EsopVarMap,
    minterm: usize,
    output: bool,
) -> Result<AssignmentBlock> {
    let n = map.num_vars;
    if minterm >= 1 << n {
        return Err(Error::MintermOutOfRange { minterm, num_vars: n });
    }
    let bit = |l: usize| minterm >> l & 1 == 1;
    let z: Vec<Var> = (0..map.num_terms).map(|_| builder.new_var()).collect();
    for (j, zj) in z.iter().enumerate() {
        for l in 0..n {
            let blocked = if bit(l) { map.q(j, l) } else { map.p(j, l) };
            builder.add_clause(&[zj.neg(), blocked.neg()])?;
        }
    }
    for (j, zj) in z.iter().enumerate() {
        let mut clause = Vec::with_capacity(n + 1);
        clause.push(zj.pos());
        clause.extend((0..n).map(|l| if bit(l) { map.q(j, l).pos() } else { map.p(j, l).pos() }));
        builder.add_clause(&clause)?;
    }
    let z_lits: Vec<Lit> = z.iter().map(|v| v.pos()).collect();
    let tseitin = builder.translate_xor(&z_lits, output)?;
    Ok(AssignmentBlock {
        minterm,
        output,
        z,
        tseitin,
    })
}

/// Builds the full constraint system: one block per care minterm, ascending.
pub fn make_csp(
    builder: &mut CnfBuilder,
    spec: &IncompleteFunction,
    num_terms: usize,
) -> Result<(EsopVarMap, Vec<AssignmentBlock>)> {
    let map = make_var_map(builder, spec.num_vars(), num_terms)?;
    let blocks = spec
        .care_minterms()
        .map(|m| add_minterm_constraints(builder, &map, m, spec.value().bit(m)))
        .collect::<Result<Vec<_>>>()?;
    Ok((map, blocks))
}

/// Reads the ESOP off a model. Terms selecting both polarities of some input
/// are constant 0 and are left out, so the result may have fewer than `k` cubes.
pub fn decode_esop(model: &Model, map: &EsopVarMap) -> EsopForm {
    let n = map.num_vars;
    let mut form = EsopForm::empty(n);
    'terms: for j in 0..map.num_terms {
        let mut trits = Vec::with_capacity(n);
        for l in 0..n {
            let t = match (model.value(map.p(j, l)), model.value(map.q(j, l))) {
                (true, false) => Trit::One,
                (false, true) => Trit::Zero,
                (false, false) => Trit::DontCare,
                (true, true) => continue 'terms,
            };
            trits.push(t);
        }
        let cube = Cube::from_trits(&trits).expect("variable count bounded by the spec");
        form.push(cube).expect("matching variable count");
    }
    form
}
