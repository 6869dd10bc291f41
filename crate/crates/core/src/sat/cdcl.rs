//! Embedded CDCL engine.
//!
//! Two watched literals with blockers, VSIDS-style activities with decay,
//! first-UIP learning with recursive minimization, phase saving, geometric
//! restarts and LBD-based reduction of the learnt clause database. All choices
//! are deterministic; a nonzero seed perturbs the initial activities.

use super::heap::ActivityHeap;
use super::{Model, SatBackend, SolveOutcome, SolverConfig};
use crate::cnf::{Lit, Var};
use crate::error::Result;

const NO_REASON: u32 = u32::MAX;

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_FIRST: f64 = 100.0;
const RESTART_FACTOR: f64 = 1.5;
const REDUCE_FIRST: u64 = 2000;
const REDUCE_INC: u64 = 300;

#[derive(Debug)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

enum SearchStatus {
    Sat,
    Unsat,
    Restart,
    Budget,
}

#[derive(Debug)]
pub struct Solver {
    config: SolverConfig,
    ok: bool,

    clauses: Vec<ClauseData>,
    free_slots: Vec<u32>,
    learnts: Vec<u32>,
    /// `watches[l]` holds the clauses watching `!l`, visited when `l` becomes true.
    watches: Vec<Vec<Watcher>>,

    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    saved_neg: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: ActivityHeap,

    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    seen: Vec<bool>,
    analyze_stack: Vec<Lit>,
    analyze_clear: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,

    rng: u64,
    next_reduce: u64,
    reduce_count: u64,

    total_conflicts: u64,
    last_conflicts: u64,
    decisions: u64,
    propagations: u64,

    #[cfg(debug_assertions)]
    originals: Vec<Vec<Lit>>,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Solver {
            config,
            ok: true,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            values: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            saved_neg: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: ActivityHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            level_stamp: vec![0],
            stamp: 0,
            rng: config.seed,
            next_reduce: REDUCE_FIRST,
            reduce_count: 0,
            total_conflicts: 0,
            last_conflicts: 0,
            decisions: 0,
            propagations: 0,
            #[cfg(debug_assertions)]
            originals: Vec::new(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// False once the formula is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn total_conflicts(&self) -> u64 {
        self.total_conflicts
    }

    pub fn decisions(&self) -> u64 {
        self.decisions
    }

    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.deleted && !c.learnt).count()
    }

    pub fn num_learnts(&self) -> usize {
        self.learnts.len()
    }

    /// Solves with the configured default conflict budget.
    pub fn solve_default(&mut self) -> SolveOutcome {
        self.solve_limited(self.config.conflict_limit)
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        self.values[l.code()]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        let v = l.var().slot();
        debug_assert_eq!(self.values[l.code()], UNDEF);
        self.values[l.code()] = TRUE;
        self.values[(!l).code()] = FALSE;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().slot();
            self.values[l.code()] = UNDEF;
            self.values[(!l).code()] = UNDEF;
            self.reason[v] = NO_REASON;
            self.saved_neg[v] = l.is_negated();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    fn alloc_clause(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let data = ClauseData {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        };
        let cref = match self.free_slots.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = data;
                slot
            }
            None => {
                self.clauses.push(data);
                (self.clauses.len() - 1) as u32
            }
        };
        let c = &self.clauses[cref as usize].lits;
        let (a, b) = (c[0], c[1]);
        self.watches[(!a).code()].push(Watcher { cref, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref, blocker: a });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.values[first.code()] == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                for k in 2..lits.len() {
                    if self.values[lits[k].code()] != FALSE {
                        lits.swap(1, k);
                        let new_watch = !lits[1];
                        self.watches[new_watch.code()].push(kept);
                        continue 'watchers;
                    }
                }
                ws[j] = kept;
                j += 1;
                if self.values[first.code()] == FALSE {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.assign(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            self.activity.iter_mut().for_each(|a| *a *= 1e-100);
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal first,
    /// a literal of the backjump level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::from_code(0)];
        let mut path_count = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level();

        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().slot();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path_count += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().slot()] {
                    break;
                }
            }
            let pl = self.trail[index];
            let v = pl.var().slot();
            p = Some(pl);
            confl = self.reason[v];
            self.seen[v] = false;
            path_count -= 1;
            if path_count == 0 {
                break;
            }
        }
        learnt[0] = !p.expect("at least one literal on the conflict level");

        // Recursive minimization.
        self.analyze_clear.clear();
        self.analyze_clear.extend_from_slice(&learnt);
        let abs = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | self.abstract_level(l.var().slot()));
        let mut kept = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var().slot()] == NO_REASON || !self.lit_redundant(l, abs) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in std::mem::take(&mut self.analyze_clear) {
            self.seen[l.var().slot()] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().slot()] > self.level[learnt[max_i].var().slot()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().slot()]
        };
        (learnt, bt)
    }

    fn lit_redundant(&mut self, p: Lit, abs: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_clear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let r = self.reason[q.var().slot()] as usize;
            for k in 1..self.clauses[r].lits.len() {
                let l = self.clauses[r].lits[k];
                let v = l.var().slot();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && self.abstract_level(v) & abs != 0 {
                    self.seen[v] = true;
                    self.analyze_stack.push(l);
                    self.analyze_clear.push(l);
                } else {
                    for c in self.analyze_clear.drain(top..) {
                        self.seen[c.var().slot()] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    fn compute_lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for l in lits {
            let lvl = self.level[l.var().slot()] as usize;
            if self.level_stamp.len() <= lvl {
                self.level_stamp.resize(lvl + 1, 0);
            }
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                count += 1;
            }
        }
        count
    }

    fn is_locked(&self, cref: u32) -> bool {
        let first = self.clauses[cref as usize].lits[0];
        self.value(first) == TRUE && self.reason[first.var().slot()] == cref
    }

    /// Drops the less useful half of the learnt clauses, keeping glue clauses
    /// (LBD <= 2) and reasons.
    fn reduce_db(&mut self) {
        let mut order = std::mem::take(&mut self.learnts);
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let limit = order.len() / 2;
        let mut keep = Vec::with_capacity(order.len());
        let mut removed = false;
        for (i, cref) in order.into_iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < limit && c.lbd > 2 && c.lits.len() > 2 && !self.is_locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
                self.free_slots.push(cref);
                removed = true;
            } else {
                keep.push(cref);
            }
        }
        self.learnts = keep;
        if removed {
            let clauses = &self.clauses;
            for ws in &mut self.watches {
                ws.retain(|w| !clauses[w.cref as usize].deleted);
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.values[2 * v] == UNDEF {
                let var = Var::new(v as u32 + 1);
                return Some(Lit::new(var, self.saved_neg[v]));
            }
        }
        None
    }

    fn search(&mut self, restart_budget: u64, limit: Option<u64>) -> SearchStatus {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.total_conflicts += 1;
                self.last_conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchStatus::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.assign(learnt[0], NO_REASON);
                } else {
                    let lbd = self.compute_lbd(&learnt);
                    let asserting = learnt[0];
                    let cref = self.alloc_clause(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.assign(asserting, cref);
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if limit.is_some_and(|l| self.last_conflicts >= l) {
                    return SearchStatus::Budget;
                }
            } else {
                if local >= restart_budget {
                    self.cancel_until(0);
                    return SearchStatus::Restart;
                }
                if self.total_conflicts >= self.next_reduce {
                    self.reduce_count += 1;
                    self.next_reduce = self.total_conflicts + REDUCE_FIRST + REDUCE_INC * self.reduce_count;
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return SearchStatus::Sat,
                    Some(l) => {
                        self.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.assign(l, NO_REASON);
                    }
                }
            }
        }
    }

    /// Decides the formula within `limit` conflicts (unlimited if `None`).
    pub fn solve_limited(&mut self, limit: Option<u64>) -> SolveOutcome {
        self.last_conflicts = 0;
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        let limit = limit.map(|l| l.max(1));
        let mut restart_budget = RESTART_FIRST;
        let outcome = loop {
            match self.search(restart_budget as u64, limit) {
                SearchStatus::Sat => {
                    let values = (0..self.activity.len()).map(|v| self.values[2 * v] == TRUE).collect();
                    break SolveOutcome::Sat(Model::new(values));
                }
                SearchStatus::Unsat => break SolveOutcome::Unsat,
                SearchStatus::Budget => break SolveOutcome::Unknown,
                SearchStatus::Restart => restart_budget *= RESTART_FACTOR,
            }
        };
        self.cancel_until(0);
        #[cfg(debug_assertions)]
        if let SolveOutcome::Sat(model) = &outcome {
            assert!(
                model.satisfies(self.originals.iter().map(Vec::as_slice)),
                "model violates an input clause"
            );
        }
        outcome
    }
}

impl SatBackend for Solver {
    fn new_var(&mut self) -> Var {
        let slot = self.activity.len();
        // Seed 0 keeps plain creation-order tie-breaking, which suits the
        // regular structure of the synthesis encodings; other seeds perturb it.
        let jitter = if self.config.seed == 0 {
            0.0
        } else {
            (splitmix(&mut self.rng) >> 11) as f64 / (1u64 << 53) as f64 * 1e-5
        };
        self.activity.push(jitter);
        self.values.extend([UNDEF, UNDEF]);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.saved_neg.push(true);
        self.seen.push(false);
        self.watches.extend([Vec::new(), Vec::new()]);
        self.order.grow(slot + 1);
        self.order.insert(slot, &self.activity);
        Var::new(slot as u32 + 1)
    }

    fn num_vars(&self) -> usize {
        self.activity.len()
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            assert!(
                l.var().slot() < self.num_vars(),
                "literal {l:?} refers to an unallocated variable"
            );
        }
        #[cfg(debug_assertions)]
        self.originals.push(lits.to_vec());
        if !self.ok {
            return;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[1] == !w[0]) {
            return;
        }
        if c.iter().any(|&l| self.value(l) == TRUE) {
            return;
        }
        c.retain(|&l| self.value(l) != FALSE);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.assign(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.alloc_clause(c, false, 0);
            }
        }
    }

    fn solve(&mut self, conflict_limit: Option<u64>) -> Result<SolveOutcome> {
        Ok(self.solve_limited(conflict_limit.or(self.config.conflict_limit)))
    }

    fn last_conflicts(&self) -> u64 {
        self.last_conflicts
    }
}
