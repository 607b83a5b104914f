//! Embedded CDCL solver.
//!
//! Two-watched-literal propagation with blockers and separate binary watch
//! lists, VSIDS branching with phase saving, recursive learned-clause
//! minimization, LBD-driven restarts and clause-database reduction. Solving
//! under assumptions follows the usual "assumptions are the first decisions"
//! scheme; when it fails, [`Solver::final_clause`] holds the negated subset of
//! assumptions responsible.
//!
//! With proof logging enabled every learned clause, every deletion and the
//! final clause (empty, or the negated failed assumptions) is recorded as a
//! DRAT step. Original clauses are never deleted, so proofs of independent
//! runs over the same formula concatenate.

use std::time::{Duration, Instant};

use crate::cnf::{Formula, Lit};

const NO_REASON: u32 = u32::MAX;
const HEADER: usize = 4;
/// Header word holding where the last replacement-watch search stopped.
const POS: usize = 3;
const LEARNT: u32 = 1;
/// Learned clauses up to this LBD are never reduced.
const KEEP_LBD: u32 = 6;

/// Values stored per literal code.
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

/// A DRAT proof step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStep {
    Add(Vec<Lit>),
    Delete(Vec<Lit>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    /// The conflict or time budget ran out.
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Polarity tried first for variables without a saved phase.
    pub initial_phase: bool,
    pub restarts: RestartPolicy,
    pub proof: bool,
    pub conflict_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            initial_phase: false,
            restarts: RestartPolicy::Glucose,
            proof: false,
            conflict_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartPolicy {
    /// Restart when recent learned clauses are worse than the long-run average.
    Glucose,
    /// Luby sequence with the given unit, in conflicts.
    Luby(u32),
    Never,
}

fn luby(mut i: u64) -> u64 {
    // 1 1 2 1 1 2 4 1 1 2 ...
    let mut size = 1;
    let mut seq = 0;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: u32,
}

#[derive(Clone, Copy)]
struct BinWatcher {
    other: u32,
    cref: u32,
}

#[inline]
fn var_of(l: u32) -> usize {
    (l >> 1) as usize
}

#[inline]
fn to_lit(l: u32) -> Lit {
    Lit::from_code(l as usize)
}

#[inline]
fn from_lit(l: Lit) -> u32 {
    l.code() as u32
}

/// Indexed binary max-heap over variable activities.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn with_vars(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![NOT_IN_HEAP; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = pv;
            self.pos[pv as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            let cv = self.heap[c];
            self.heap[i] = cv;
            self.pos[cv as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        let i = self.heap.len() - 1;
        self.pos[v] = i as u32;
        self.up(i, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top as usize)
    }
}

pub struct Solver {
    num_vars: usize,
    config: SolverConfig,
    arena: Vec<u32>,
    wasted: usize,
    removed: std::collections::HashSet<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    bin_watches: Vec<Vec<BinWatcher>>,
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<u8>,
    level_stamp: Vec<u64>,
    stamp: u64,
    analyze_stack: Vec<u32>,
    analyze_toclear: Vec<u32>,
    ok: bool,
    model: Vec<bool>,
    final_clause: Vec<Lit>,
    proof: Option<Vec<ProofStep>>,
    stats: Stats,
    // restart / reduction schedule
    lbd_fast: f64,
    lbd_slow: f64,
    conflicts_since_restart: u64,
    next_reduce: u64,
    reduce_inc: u64,
    rng: u64,
}

impl Solver {
    pub fn new(num_vars: u32, config: SolverConfig) -> Self {
        let n = num_vars as usize;
        let mut s = Solver {
            num_vars: n,
            arena: Vec::new(),
            wasted: 0,
            removed: Default::default(),
            learnts: Vec::new(),
            watches: (0..2 * n).map(|_| Vec::new()).collect(),
            bin_watches: (0..2 * n).map(|_| Vec::new()).collect(),
            vals: vec![UNDEF; 2 * n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::with_vars(n),
            phase: vec![config.initial_phase; n],
            seen: vec![0; n],
            level_stamp: vec![0; n + 1],
            stamp: 0,
            analyze_stack: Vec::new(),
            analyze_toclear: Vec::new(),
            ok: true,
            model: Vec::new(),
            final_clause: Vec::new(),
            proof: config.proof.then(Vec::new),
            stats: Stats::default(),
            lbd_fast: 0.0,
            lbd_slow: 0.0,
            conflicts_since_restart: 0,
            next_reduce: 2000,
            reduce_inc: 300,
            rng: config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1,
            config,
        };
        if s.config.seed != 0 {
            for v in 0..n {
                s.activity[v] = s.next_random() * 1e-5;
            }
        }
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        s
    }

    /// Loads every clause of `f`.
    pub fn from_formula(f: &Formula, config: SolverConfig) -> Self {
        let mut s = Solver::new(f.num_vars(), config);
        for c in f.clauses() {
            if !s.add_clause(c.lits()) {
                break;
            }
        }
        s
    }

    fn next_random(&mut self) -> f64 {
        self.rng ^= self.rng << 13;
        self.rng ^= self.rng >> 7;
        self.rng ^= self.rng << 17;
        (self.rng >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars as u32
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Model of the last satisfiable call, indexed by zero-based variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    /// After an unsatisfiable call under assumptions: a clause made of
    /// negated assumptions that the formula implies. Empty when the formula
    /// is unsatisfiable on its own.
    pub fn final_clause(&self) -> &[Lit] {
        &self.final_clause
    }

    pub fn take_proof(&mut self) -> Vec<ProofStep> {
        self.proof.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn proof(&self) -> Option<&[ProofStep]> {
        self.proof.as_deref()
    }

    #[inline]
    fn val(&self, l: u32) -> i8 {
        self.vals[l as usize]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn log_add(&mut self, lits: &[u32]) {
        if let Some(p) = self.proof.as_mut() {
            p.push(ProofStep::Add(lits.iter().map(|&l| to_lit(l)).collect()));
        }
    }

    fn log_delete(&mut self, cref: u32) {
        if self.proof.is_some() {
            let lits = self.clause_lits(cref).iter().map(|&l| to_lit(l)).collect();
            self.proof.as_mut().unwrap().push(ProofStep::Delete(lits));
        }
    }

    #[inline]
    fn clause_len(&self, cref: u32) -> usize {
        self.arena[cref as usize] as usize
    }

    #[inline]
    fn clause_lits(&self, cref: u32) -> &[u32] {
        let start = cref as usize + HEADER;
        &self.arena[start..start + self.clause_len(cref)]
    }

    fn is_learnt(&self, cref: u32) -> bool {
        self.arena[cref as usize + 1] & LEARNT != 0
    }

    fn lbd(&self, cref: u32) -> u32 {
        self.arena[cref as usize + 1] >> 1
    }

    fn set_lbd(&mut self, cref: u32, lbd: u32) {
        let flags = self.arena[cref as usize + 1] & LEARNT;
        self.arena[cref as usize + 1] = flags | (lbd << 1);
    }


    fn clause_activity(&self, cref: u32) -> f32 {
        f32::from_bits(self.arena[cref as usize + 2])
    }

    fn set_clause_activity(&mut self, cref: u32, a: f32) {
        self.arena[cref as usize + 2] = a.to_bits();
    }

    fn alloc(&mut self, lits: &[u32], learnt: bool, lbd: u32) -> u32 {
        let cref = self.arena.len() as u32;
        self.arena.push(lits.len() as u32);
        self.arena.push(u32::from(learnt) | (lbd << 1));
        self.arena.push(0f32.to_bits());
        self.arena.push(2);
        self.arena.extend_from_slice(lits);
        cref
    }

    fn attach(&mut self, cref: u32) {
        let lits = self.clause_lits(cref);
        let (a, b) = (lits[0], lits[1]);
        if lits.len() == 2 {
            self.bin_watches[(a ^ 1) as usize].push(BinWatcher { other: b, cref });
            self.bin_watches[(b ^ 1) as usize].push(BinWatcher { other: a, cref });
        } else {
            self.watches[(a ^ 1) as usize].push(Watcher { cref, blocker: b });
            self.watches[(b ^ 1) as usize].push(Watcher { cref, blocker: a });
        }
    }

    /// Adds an original clause at decision level 0. Returns `false` once the
    /// formula is known to be unsatisfiable.
    pub fn add_clause(&mut self, clause: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut lits: Vec<u32> = clause.iter().map(|&l| from_lit(l)).collect();
        assert!(
            lits.iter().all(|&l| var_of(l) < self.num_vars),
            "clause mentions an undeclared variable"
        );
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        // Satisfied at level 0: the clause can never matter.
        if lits.iter().any(|&l| self.val(l) == TRUE) {
            return true;
        }
        // Watch non-false literals first.
        lits.sort_by_key(|&l| self.val(l) == FALSE);
        match lits.len() {
            0 => {
                self.ok = false;
                self.log_add(&[]);
                false
            }
            _ if self.val(lits[0]) == FALSE => {
                // all literals false at level 0
                self.ok = false;
                self.log_add(&[]);
                false
            }
            1 => {
                self.assign(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                    self.log_add(&[]);
                    return false;
                }
                true
            }
            _ => {
                let cref = self.alloc(&lits, false, 0);
                self.attach(cref);
                if self.val(lits[1]) == FALSE {
                    self.assign(lits[0], cref);
                    if self.propagate().is_some() {
                        self.ok = false;
                        self.log_add(&[]);
                        return false;
                    }
                }
                true
            }
        }
    }

    #[inline]
    fn assign(&mut self, l: u32, reason: u32) {
        let v = var_of(l);
        self.vals[l as usize] = TRUE;
        self.vals[(l ^ 1) as usize] = FALSE;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var_of(l);
            self.vals[l as usize] = UNDEF;
            self.vals[(l ^ 1) as usize] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = l & 1 == 0;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;

            let bins = std::mem::take(&mut self.bin_watches[p as usize]);
            for w in &bins {
                match self.val(w.other) {
                    TRUE => {}
                    FALSE => {
                        conflict = Some(w.cref);
                        break;
                    }
                    _ => self.assign(w.other, w.cref),
                }
            }
            self.bin_watches[p as usize] = bins;
            if conflict.is_some() {
                break;
            }

            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let n = ws.len();
            // SAFETY: watcher crefs always point at live clauses of the arena
            // and every literal code is below `vals.len()`; indices `i`, `j`
            // stay below `n = ws.len()`.
            unsafe {
                'watch: while i < n {
                    let w = *ws.get_unchecked(i);
                    i += 1;
                    if *self.vals.get_unchecked(w.blocker as usize) == TRUE {
                        *ws.get_unchecked_mut(j) = w;
                        j += 1;
                        continue;
                    }
                    let base = w.cref as usize;
                    let start = base + HEADER;
                    let len = *self.arena.get_unchecked(base) as usize;
                    if *self.arena.get_unchecked(start) == false_lit {
                        self.arena.swap(start, start + 1);
                    }
                    let first = *self.arena.get_unchecked(start);
                    let nw = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    if first != w.blocker && *self.vals.get_unchecked(first as usize) == TRUE {
                        *ws.get_unchecked_mut(j) = nw;
                        j += 1;
                        continue;
                    }
                    if len > 2 {
                        // circular search starting where the last one stopped
                        let pos = (*self.arena.get_unchecked(base + POS) as usize).clamp(2, len);
                        for k in (pos..len).chain(2..pos) {
                            let l = *self.arena.get_unchecked(start + k);
                            if *self.vals.get_unchecked(l as usize) != FALSE {
                                *self.arena.get_unchecked_mut(base + POS) = k as u32;
                                self.arena.swap(start + 1, start + k);
                                self.watches.get_unchecked_mut((l ^ 1) as usize).push(nw);
                                continue 'watch;
                            }
                        }
                    }
                    *ws.get_unchecked_mut(j) = nw;
                    j += 1;
                    if *self.vals.get_unchecked(first as usize) == FALSE {
                        conflict = Some(w.cref);
                        while i < n {
                            *ws.get_unchecked_mut(j) = *ws.get_unchecked(i);
                            j += 1;
                            i += 1;
                        }
                    } else {
                        self.assign(first, w.cref);
                    }
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let a = self.clause_activity(cref) + self.cla_inc;
        self.set_clause_activity(cref, a);
        if a > 1e20 {
            for &c in &self.learnts.clone() {
                let x = self.clause_activity(c) * 1e-20;
                self.set_clause_activity(c, x);
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn compute_lbd(&mut self, lits: &[u32]) -> u32 {
        self.stamp += 1;
        let mut n = 0;
        for &l in lits {
            let lv = self.level[var_of(l)] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                n += 1;
            }
        }
        n
    }

    fn clause_lbd(&mut self, cref: u32) -> u32 {
        self.stamp += 1;
        let mut n = 0;
        let start = cref as usize + HEADER;
        for k in start..start + self.clause_len(cref) {
            let lv = self.level[var_of(self.arena[k])] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                n += 1;
            }
        }
        n
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP analysis; returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let mut learnt: Vec<u32> = vec![0];
        let mut path = 0;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            if self.is_learnt(confl) {
                self.bump_clause(confl);
                // refresh the LBD of clauses taking part in conflicts
                if self.lbd(confl) > KEEP_LBD {
                    let lbd = self.clause_lbd(confl);
                    if lbd + 1 < self.lbd(confl) {
                        self.set_lbd(confl, lbd);
                    }
                }
            }
            let len = self.clause_len(confl);
            for k in 0..len {
                let q = self.arena[confl as usize + HEADER + k];
                if Some(q) == p {
                    continue;
                }
                let v = var_of(q);
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] != 0 {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[var_of(pl)] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[var_of(pl)];
        }
        learnt[0] = p.unwrap() ^ 1;

        // recursive minimization
        self.analyze_toclear.clear();
        self.analyze_toclear.extend_from_slice(&learnt);
        let mut abs = 0u32;
        for &l in &learnt[1..] {
            abs |= self.abstract_level(var_of(l));
        }
        let mut keep = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[var_of(l)] == NO_REASON || !self.lit_redundant(l, abs) {
                learnt[keep] = l;
                keep += 1;
            }
        }
        learnt.truncate(keep);
        for &l in &self.analyze_toclear {
            self.seen[var_of(l)] = 0;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[var_of(learnt[i])] > self.level[var_of(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[var_of(learnt[1])]
        };
        (learnt, bt)
    }

    fn lit_redundant(&mut self, p: u32, abs: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_toclear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[var_of(q)];
            let len = self.clause_len(cref);
            for k in 0..len {
                let l = self.arena[cref as usize + HEADER + k];
                let v = var_of(l);
                if v == var_of(q) {
                    continue;
                }
                if self.seen[v] == 0 && self.level[v] > 0 {
                    if self.reason[v] != NO_REASON && (self.abstract_level(v) & abs) != 0 {
                        self.seen[v] = 1;
                        self.analyze_stack.push(l);
                        self.analyze_toclear.push(l);
                    } else {
                        for &c in &self.analyze_toclear[top..] {
                            self.seen[var_of(c)] = 0;
                        }
                        self.analyze_toclear.truncate(top);
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Collects the assumptions responsible for `p` being false; `p` is an
    /// assumption whose negation is on the trail.
    fn analyze_final(&mut self, p: u32) {
        self.final_clause.clear();
        self.final_clause.push(to_lit(p ^ 1));
        if self.decision_level() == 0 {
            return;
        }
        self.seen[var_of(p)] = 1;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var_of(l);
            if self.seen[v] == 0 {
                continue;
            }
            if self.reason[v] == NO_REASON {
                if self.level[v] > 0 && v != var_of(p) {
                    self.final_clause.push(to_lit(l ^ 1));
                }
            } else {
                let cref = self.reason[v];
                for k in 0..self.clause_len(cref) {
                    let q = self.arena[cref as usize + HEADER + k];
                    if self.level[var_of(q)] > 0 {
                        self.seen[var_of(q)] = 1;
                    }
                }
            }
            self.seen[v] = 0;
        }
        self.seen[var_of(p)] = 0;
    }

    fn locked(&self, cref: u32) -> bool {
        let lits = self.clause_lits(cref);
        lits.iter().take(2).any(|&l| {
            self.val(l) == TRUE && self.reason[var_of(l)] == cref
        })
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.lbd(c) > KEEP_LBD && !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            self.lbd(b)
                .cmp(&self.lbd(a))
                .then(self.clause_activity(a).total_cmp(&self.clause_activity(b)))
        });
        let remove: Vec<u32> = cands[..cands.len() / 2].to_vec();
        if remove.is_empty() {
            return;
        }
        let mut dead = std::collections::HashSet::with_capacity(remove.len());
        for &c in &remove {
            self.log_delete(c);
            self.wasted += HEADER + self.clause_len(c);
            dead.insert(c);
        }
        self.stats.deleted += remove.len() as u64;
        self.learnts.retain(|c| !dead.contains(c));
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !dead.contains(&w.cref));
        }
        self.removed.extend(dead);
        if self.wasted * 5 > self.arena.len() {
            self.collect_garbage();
        }
    }

    /// Compacts the arena, dropping removed clauses and remapping references.
    fn collect_garbage(&mut self) {
        let mut fresh = Vec::with_capacity(self.arena.len() - self.wasted);
        let mut map = std::collections::HashMap::new();
        let mut pos = 0usize;
        while pos < self.arena.len() {
            let len = self.arena[pos] as usize;
            let cref = pos as u32;
            if !self.removed.contains(&cref) {
                map.insert(cref, fresh.len() as u32);
                fresh.extend_from_slice(&self.arena[pos..pos + HEADER + len]);
            }
            pos += HEADER + len;
        }
        self.arena = fresh;
        self.removed.clear();
        self.wasted = 0;
        for r in self.reason.iter_mut() {
            if *r != NO_REASON {
                *r = map[r];
            }
        }
        for c in self.learnts.iter_mut() {
            *c = map[c];
        }
        for ws in self.watches.iter_mut() {
            for w in ws.iter_mut() {
                w.cref = map[&w.cref];
            }
        }
        for ws in self.bin_watches.iter_mut() {
            for w in ws.iter_mut() {
                w.cref = map[&w.cref];
            }
        }
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.vals[2 * v] == UNDEF {
                let neg = !self.phase[v];
                return Some((v as u32) << 1 | u32::from(neg));
            }
        }
        None
    }

    fn budget_exhausted(&self, start: Instant, conflicts_at_start: u64) -> bool {
        if let Some(limit) = self.config.conflict_limit {
            if self.stats.conflicts - conflicts_at_start >= limit {
                return true;
            }
        }
        if let Some(t) = self.config.time_limit {
            if self.stats.conflicts % 64 == 0 && start.elapsed() >= t {
                return true;
            }
        }
        false
    }

    /// Solves under the given assumptions.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Status {
        self.model.clear();
        self.final_clause.clear();
        if !self.ok {
            return Status::Unsat;
        }
        let assumps: Vec<u32> = assumptions.iter().map(|&l| from_lit(l)).collect();
        assert!(
            assumps.iter().all(|&l| var_of(l) < self.num_vars),
            "assumption mentions an undeclared variable"
        );
        let start = Instant::now();
        let conflicts_at_start = self.stats.conflicts;
        let status = self.search(&assumps, start, conflicts_at_start);
        if status == Status::Sat {
            self.model = (0..self.num_vars).map(|v| self.vals[2 * v] == TRUE).collect();
        }
        self.cancel_until(0);
        status
    }

    fn search(&mut self, assumps: &[u32], start: Instant, c0: u64) -> Status {
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                self.conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.log_add(&[]);
                    return Status::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                let lbd = self.compute_lbd(&learnt);
                self.lbd_fast += (lbd as f64 - self.lbd_fast) / 32.0;
                self.lbd_slow += (lbd as f64 - self.lbd_slow) / 4096.0;
                self.cancel_until(bt);
                self.log_add(&learnt);
                self.stats.learned += 1;
                if learnt.len() == 1 {
                    self.assign(learnt[0], NO_REASON);
                } else {
                    let cref = self.alloc(&learnt, true, lbd);
                    self.attach(cref);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.assign(learnt[0], cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.budget_exhausted(start, c0) {
                    return Status::Unknown;
                }
            } else {
                let restart = match self.config.restarts {
                    RestartPolicy::Glucose => {
                        self.conflicts_since_restart > 50 && self.lbd_fast > 1.25 * self.lbd_slow
                    }
                    RestartPolicy::Luby(unit) => {
                        self.conflicts_since_restart >= luby(self.stats.restarts) * u64::from(unit)
                    }
                    RestartPolicy::Never => false,
                };
                if restart && self.decision_level() > assumps.len() as u32 {
                    self.stats.restarts += 1;
                    self.conflicts_since_restart = 0;
                    self.cancel_until(0);
                    continue;
                }
                if self.stats.conflicts >= self.next_reduce {
                    self.next_reduce = self.stats.conflicts + 2000 + self.reduce_inc;
                    self.reduce_inc += 300;
                    self.reduce_db();
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumps.len() {
                    let a = assumps[self.decision_level() as usize];
                    match self.val(a) {
                        TRUE => self.new_decision_level(),
                        FALSE => {
                            self.analyze_final(a);
                            let clause: Vec<u32> = self.final_clause.iter().map(|&l| from_lit(l)).collect();
                            self.log_add(&clause);
                            return Status::Unsat;
                        }
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let lit = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => l,
                        None => return Status::Sat,
                    },
                };
                self.stats.decisions += 1;
                self.new_decision_level();
                self.assign(lit, NO_REASON);
            }
        }
    }

    /// Deletion steps for every learned clause still in the database, so a
    /// proof segment can end without leaving its lemmas behind.
    pub fn log_learned_cleanup(&mut self) {
        if self.proof.is_none() {
            return;
        }
        let learnts = self.learnts.clone();
        for c in learnts {
            self.log_delete(c);
        }
    }
}
