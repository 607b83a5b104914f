//! Clausal proofs: DRAT segments, a forward RUP/RAT checker, the
//! re-encoding, implication and tautology parts of an unsatisfiability
//! proof, and the bound certificate built on top of a checked proof.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{Clause, Formula, InstanceDescriptor, Lit, FIRST_REGIONAL_COLOR};
use crate::encoder::{encode, ClauseKind, EncodeError, Encoding, EncodingOptions};
use crate::engine::{self, CubeRunOptions, CubeRunReport, EngineError, SolveOptions, SolveStatus};
use crate::solver::{ProofStep, Solver, SolverConfig, Status};
use crate::splitter::{Cube, CubeLayout, SplitError, SplitParams};

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("clause {clause} fails its {check} check (pivot {pivot:?})")]
    Redundancy {
        clause: String,
        pivot: Option<Lit>,
        check: &'static str,
    },
    #[error("optimized formula contains a {0:?} clause, which has no re-encoding step")]
    UnsupportedKind(ClauseKind),
    #[error("encodings disagree on the instance: {0}")]
    Mismatch(String),
    #[error("the cubes do not form a tautology")]
    NotTautology,
    #[error("proof parts out of order: {0:?} after {1:?}")]
    Order(Provenance, Provenance),
    #[error("bound refused: {0}")]
    Refused(String),
    #[error("DRAT parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which part of the pipeline a segment belongs to. The order of the
/// variants is the concatenation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Symmetry,
    Reencoding,
    Implication,
    Tautology,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// `pivot` names the literal a RAT check resolves on; without one the
    /// first literal is used, as in plain DRAT.
    Add { clause: Vec<Lit>, pivot: Option<Lit> },
    Delete(Vec<Lit>),
}

impl Step {
    pub fn add(clause: Vec<Lit>) -> Self {
        Step::Add { clause, pivot: None }
    }

    pub fn add_rat(clause: Vec<Lit>, pivot: Lit) -> Self {
        Step::Add {
            clause,
            pivot: Some(pivot),
        }
    }

    pub fn is_add(&self) -> bool {
        matches!(self, Step::Add { .. })
    }

    pub fn clause(&self) -> &[Lit] {
        match self {
            Step::Add { clause, .. } | Step::Delete(clause) => clause,
        }
    }
}

impl From<ProofStep> for Step {
    fn from(s: ProofStep) -> Self {
        match s {
            ProofStep::Add(c) => Step::add(c),
            ProofStep::Delete(c) => Step::Delete(c),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, lits): (&str, Vec<Lit>) = match self {
            Step::Add { clause, pivot } => {
                let mut lits = clause.clone();
                // DRAT reads the pivot off the first position
                if let Some(p) = pivot {
                    if let Some(i) = lits.iter().position(|l| l == p) {
                        lits.swap(0, i);
                    }
                }
                ("", lits)
            }
            Step::Delete(c) => ("d ", c.clone()),
        };
        f.write_str(prefix)?;
        for l in lits {
            write!(f, "{l} ")?;
        }
        f.write_str("0")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofSegment {
    pub provenance: Provenance,
    pub steps: Vec<Step>,
}

impl ProofSegment {
    pub fn new(provenance: Provenance, steps: Vec<Step>) -> Self {
        ProofSegment { provenance, steps }
    }

    pub fn from_solver(provenance: Provenance, steps: Vec<ProofStep>) -> Self {
        ProofSegment::new(provenance, steps.into_iter().map(Step::from).collect())
    }

    pub fn additions(&self) -> usize {
        self.steps.iter().filter(|s| s.is_add()).count()
    }

    pub fn derives_empty(&self) -> bool {
        self.steps.iter().any(|s| matches!(s, Step::Add { clause, .. } if clause.is_empty()))
    }

    pub fn write_drat<W: Write>(&self, out: W) -> io::Result<()> {
        write_steps(out, &self.steps)
    }

    pub fn to_drat(&self) -> String {
        let mut out = Vec::new();
        self.write_drat(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("DRAT text is ASCII")
    }
}

fn write_steps<W: Write>(mut out: W, steps: &[Step]) -> io::Result<()> {
    for s in steps {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

/// Writes raw solver steps as DRAT text.
pub fn write_drat<W: Write>(mut out: W, steps: &[ProofStep]) -> io::Result<()> {
    for s in steps {
        let (prefix, lits) = match s {
            ProofStep::Add(c) => ("", c),
            ProofStep::Delete(c) => ("d ", c),
        };
        out.write_all(prefix.as_bytes())?;
        for l in lits {
            write!(out, "{l} ")?;
        }
        out.write_all(b"0\n")?;
    }
    Ok(())
}

/// Parses DRAT text. Pivots are left implicit (first literal).
pub fn parse_drat<R: BufRead>(input: R) -> Result<Vec<Step>, ProofError> {
    let mut steps = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut delete = false;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let mut toks = line.split_whitespace().peekable();
        if toks.peek() == Some(&"c") {
            continue;
        }
        while let Some(tok) = toks.next() {
            if tok == "d" && pending.is_empty() && !delete {
                delete = true;
                continue;
            }
            let v: i32 = tok.parse().map_err(|_| ProofError::Parse {
                line: n + 1,
                msg: format!("bad token {tok:?}"),
            })?;
            if v == 0 {
                let clause = std::mem::take(&mut pending);
                steps.push(if delete { Step::Delete(clause) } else { Step::add(clause) });
                delete = false;
            } else {
                pending.push(Lit::from_dimacs(v).expect("nonzero"));
            }
        }
    }
    if !pending.is_empty() || delete {
        return Err(ProofError::Parse {
            line: 0,
            msg: "unterminated step at end of input".into(),
        });
    }
    Ok(steps)
}

pub fn parse_drat_str(text: &str) -> Result<Vec<Step>, ProofError> {
    parse_drat(text.as_bytes())
}

// ---------------------------------------------------------------------------
// forward checker

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;
/// Arena words in front of each clause: length, alive flag, search position.
const HEADER: usize = 3;

#[derive(Clone, Copy)]
struct Rec {
    start: u32,
    len: u32,
    alive: bool,
}

#[derive(Clone, Copy)]
struct Watch {
    /// Arena offset of the clause's first literal.
    cref: u32,
    blocker: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub step: usize,
    pub clause: Vec<Lit>,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.clause.iter().map(|l| l.to_string()).collect();
        write!(f, "step {}: [{}] {}", self.step, c.join(" "), self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub additions: usize,
    pub rat_additions: usize,
    pub deletions: usize,
    /// Deletions of clauses that were not in the formula; ignored.
    pub missing_deletions: usize,
    pub rebuilds: usize,
    pub wall: Duration,
}

/// Incremental forward checker: holds the accumulated formula and checks
/// each addition against it before accepting it.
pub struct Checker {
    lits: Vec<u32>,
    recs: Vec<Rec>,
    watches: Vec<Vec<Watch>>,
    /// Binary clauses, by the literal whose falsification triggers them:
    /// `(other literal, clause id)`.
    bins: Vec<Vec<(u32, u32)>>,
    index: HashMap<Vec<u32>, Vec<u32>>,
    vals: Vec<i8>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    qhead: usize,
    /// Number of trail entries that are top-level facts.
    top: usize,
    inconsistent: bool,
    dirty: bool,
    dead_lits: usize,
    pub stats: CheckStats,
}

#[inline]
fn code(l: Lit) -> u32 {
    l.code() as u32
}

fn key(lits: &[u32]) -> Vec<u32> {
    let mut k = lits.to_vec();
    k.sort_unstable();
    k.dedup();
    k
}

impl Checker {
    pub fn new(f: &Formula) -> Self {
        let n = f.num_vars() as usize;
        let mut c = Checker {
            lits: Vec::new(),
            recs: Vec::new(),
            watches: Vec::new(),
            bins: Vec::new(),
            index: HashMap::new(),
            vals: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            qhead: 0,
            top: 0,
            inconsistent: false,
            dirty: false,
            dead_lits: 0,
            stats: CheckStats::default(),
        };
        c.grow(n);
        for cl in f.clauses() {
            c.insert(cl.lits());
        }
        c
    }

    fn grow(&mut self, vars: usize) {
        if self.reason.len() < vars {
            self.vals.resize(2 * vars, UNDEF);
            self.reason.resize(vars, NO_REASON);
            self.watches.resize_with(2 * vars, Vec::new);
            self.bins.resize_with(2 * vars, Vec::new);
        }
    }

    /// Whether unit propagation on the accumulated formula alone conflicts.
    pub fn is_inconsistent(&mut self) -> bool {
        self.refresh();
        self.inconsistent
    }

    pub fn num_clauses(&self) -> usize {
        self.index.values().map(Vec::len).sum()
    }

    /// The accumulated formula as sorted, deduplicated literal lists.
    pub fn clauses(&self) -> Vec<Vec<Lit>> {
        let mut out: Vec<Vec<Lit>> = self
            .index
            .iter()
            .flat_map(|(k, ids)| {
                let mut c: Vec<Lit> = k.iter().map(|&l| Lit::from_code(l as usize)).collect();
                c.sort();
                std::iter::repeat_n(c, ids.len())
            })
            .collect();
        out.sort();
        out
    }

    #[inline]
    fn val(&self, l: u32) -> i8 {
        self.vals[l as usize]
    }

    fn clause(&self, id: u32) -> &[u32] {
        let r = self.recs[id as usize];
        &self.lits[r.start as usize..(r.start + r.len) as usize]
    }

    fn assign(&mut self, l: u32, reason: u32) {
        self.vals[l as usize] = TRUE;
        self.vals[(l ^ 1) as usize] = FALSE;
        self.reason[(l >> 1) as usize] = reason;
        self.trail.push(l);
    }

    fn backtrack(&mut self, len: usize) {
        for i in (len..self.trail.len()).rev() {
            let l = self.trail[i];
            self.vals[l as usize] = UNDEF;
            self.vals[(l ^ 1) as usize] = UNDEF;
            self.reason[(l >> 1) as usize] = NO_REASON;
        }
        self.trail.truncate(len);
        self.qhead = self.qhead.min(len);
    }

    /// Stores a clause and makes it part of the top-level state.
    fn insert(&mut self, clause: &[Lit]) {
        let mut lits: Vec<u32> = clause.iter().map(|&l| code(l)).collect();
        if let Some(m) = lits.iter().max() {
            self.grow((*m as usize >> 1) + 1);
        }
        let k = key(&lits);
        lits = k.clone();
        let id = self.recs.len() as u32;
        self.lits.extend_from_slice(&[lits.len() as u32, 1, 2]);
        self.recs.push(Rec {
            start: self.lits.len() as u32,
            len: lits.len() as u32,
            alive: true,
        });
        self.lits.extend_from_slice(&lits);
        self.index.entry(k).or_default().push(id);
        if !self.dirty {
            self.attach_top(id);
        }
    }

    /// Attaches a clause to the watch lists against the current top-level
    /// assignment, propagating it if it is unit.
    fn attach_top(&mut self, id: u32) {
        let r = self.recs[id as usize];
        let start = r.start as usize;
        let len = r.len as usize;
        if len == 0 {
            self.inconsistent = true;
            return;
        }
        // true literals first, then unassigned, then false
        let rank = |v: i8| match v {
            TRUE => 0,
            UNDEF => 1,
            _ => 2,
        };
        for w in 0..len.min(2) {
            let mut best = start + w;
            for i in start + w + 1..start + len {
                if rank(self.val(self.lits[i])) < rank(self.val(self.lits[best])) {
                    best = i;
                }
            }
            self.lits.swap(start + w, best);
        }
        let a = self.lits[start];
        let cref = r.start;
        if len == 2 {
            let b = self.lits[start + 1];
            self.bins[(a ^ 1) as usize].push((b, cref));
            self.bins[(b ^ 1) as usize].push((a, cref));
        } else if len > 2 {
            let b = self.lits[start + 1];
            self.watches[(a ^ 1) as usize].push(Watch { cref, blocker: b });
            self.watches[(b ^ 1) as usize].push(Watch { cref, blocker: a });
        }
        match self.val(a) {
            TRUE => {}
            FALSE => self.inconsistent = true,
            _ => {
                if len == 1 || self.val(self.lits[start + 1]) == FALSE {
                    self.assign(a, cref);
                    if self.propagate() {
                        self.inconsistent = true;
                    }
                }
            }
        }
        self.top = self.trail.len();
    }

    /// Unit propagation; true on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            for i in 0..self.bins[p as usize].len() {
                let (other, id) = self.bins[p as usize][i];
                match self.val(other) {
                    TRUE => {}
                    FALSE => return true,
                    _ => self.assign(other, id),
                }
            }
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = false;
            'next: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.val(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let start = w.cref as usize;
                if self.lits[start - 2] == 0 {
                    continue; // drop stale watcher
                }
                let len = self.lits[start - HEADER] as usize;
                if self.lits[start] == false_lit {
                    self.lits.swap(start, start + 1);
                }
                let first = self.lits[start];
                let nw = Watch { cref: w.cref, blocker: first };
                if self.val(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                // circular search from where the last one succeeded
                let pos = self.lits[start - 1] as usize;
                for k in (pos..len).chain(2..pos) {
                    let l = self.lits[start + k];
                    if self.val(l) != FALSE {
                        self.lits.swap(start + 1, start + k);
                        self.lits[start - 1] = k as u32;
                        self.watches[(l ^ 1) as usize].push(nw);
                        continue 'next;
                    }
                }
                ws[j] = nw;
                j += 1;
                if self.val(first) == FALSE {
                    conflict = true;
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.assign(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict {
                return true;
            }
        }
        false
    }

    /// Recomputes the top-level state from scratch after deletions removed
    /// a reason clause.
    fn refresh(&mut self) {
        if !self.dirty {
            return;
        }
        self.dirty = false;
        self.stats.rebuilds += 1;
        self.backtrack(0);
        self.qhead = 0;
        self.inconsistent = false;
        for w in self.watches.iter_mut() {
            w.clear();
        }
        for b in self.bins.iter_mut() {
            b.clear();
        }
        if self.dead_lits * 2 > self.lits.len() {
            self.compact();
        }
        for id in 0..self.recs.len() as u32 {
            if self.recs[id as usize].alive {
                self.attach_top(id);
            }
        }
        self.top = self.trail.len();
    }

    fn compact(&mut self) {
        let mut fresh = Vec::with_capacity(self.lits.len() - self.dead_lits);
        for r in self.recs.iter_mut() {
            if r.alive {
                let s = r.start as usize;
                fresh.extend_from_slice(&[r.len, 1, 2]);
                r.start = fresh.len() as u32;
                fresh.extend_from_slice(&self.lits[s..s + r.len as usize]);
            } else {
                r.len = 0;
                r.start = 0;
            }
        }
        self.lits = fresh;
        self.dead_lits = 0;
    }

    /// Removes one copy of the clause. Returns false if it is not present.
    pub fn delete(&mut self, clause: &[Lit]) -> bool {
        self.stats.deletions += 1;
        let k = key(&clause.iter().map(|&l| code(l)).collect::<Vec<_>>());
        let Some(ids) = self.index.get_mut(&k) else {
            self.stats.missing_deletions += 1;
            return false;
        };
        let id = ids.pop().expect("index entries are non-empty");
        if ids.is_empty() {
            self.index.remove(&k);
        }
        let cref = self.recs[id as usize].start;
        self.recs[id as usize].alive = false;
        self.lits[cref as usize - 2] = 0;
        self.dead_lits += k.len() + HEADER;
        if self.recs[id as usize].len == 2 && !self.dirty {
            for &l in self.clause(id).to_vec().iter() {
                let list = &mut self.bins[(l ^ 1) as usize];
                if let Some(pos) = list.iter().position(|&(_, c)| c == cref) {
                    list.swap_remove(pos);
                }
            }
        }
        let is_reason = self
            .clause(id)
            .iter()
            .any(|&l| self.reason[(l >> 1) as usize] == cref && self.val(l) == TRUE);
        if is_reason || k.is_empty() || self.inconsistent {
            self.dirty = true;
        }
        true
    }

    /// Adds a clause without checking it.
    pub fn add_axiom(&mut self, clause: &[Lit]) {
        self.refresh();
        self.insert(clause);
    }

    /// Assigns the negation of `clause` on top of the top-level state and
    /// propagates. True when a conflict shows the clause is implied.
    fn assign_negation(&mut self, clause: &[u32]) -> bool {
        for &l in clause {
            match self.val(l) {
                TRUE => return true,
                FALSE => {}
                _ => self.assign(l ^ 1, NO_REASON),
            }
        }
        self.propagate()
    }

    pub fn is_rup(&mut self, clause: &[Lit]) -> bool {
        self.refresh();
        if self.inconsistent {
            return true;
        }
        let lits: Vec<u32> = clause.iter().map(|&l| code(l)).collect();
        if let Some(m) = lits.iter().max() {
            self.grow((*m as usize >> 1) + 1);
        }
        let ok = self.assign_negation(&lits);
        self.backtrack(self.top);
        self.qhead = self.top;
        ok
    }

    /// RAT on `pivot`: every resolvent with a clause containing `¬pivot` is
    /// a tautology or RUP.
    pub fn is_rat(&mut self, clause: &[Lit], pivot: Lit) -> bool {
        self.refresh();
        if self.inconsistent {
            return true;
        }
        if !clause.contains(&pivot) {
            return false;
        }
        let lits: Vec<u32> = clause.iter().map(|&l| code(l)).collect();
        if let Some(m) = lits.iter().max() {
            self.grow((*m as usize >> 1) + 1);
        }
        let neg_pivot = code(pivot) ^ 1;
        let mut ok = true;
        if !self.assign_negation(&lits) {
            let level = self.trail.len();
            let candidates: Vec<u32> = (0..self.recs.len() as u32)
                .filter(|&id| self.recs[id as usize].alive && self.clause(id).contains(&neg_pivot))
                .collect();
            for id in candidates {
                let other: Vec<u32> = self.clause(id).iter().copied().filter(|&l| l != neg_pivot).collect();
                let implied = self.assign_negation(&other);
                self.backtrack(level);
                self.qhead = level;
                if !implied {
                    ok = false;
                    break;
                }
            }
        }
        self.backtrack(self.top);
        self.qhead = self.top;
        ok
    }

    /// Checks and then adds a clause: RUP first, then RAT on the pivot (or
    /// on the first literal).
    pub fn add_checked(&mut self, clause: &[Lit], pivot: Option<Lit>) -> Result<(), &'static str> {
        self.stats.additions += 1;
        if !self.is_rup(clause) {
            let Some(p) = pivot.or_else(|| clause.first().copied()) else {
                return Err("RUP");
            };
            if !self.is_rat(clause, p) {
                return Err("RAT");
            }
            self.stats.rat_additions += 1;
        }
        self.insert(clause);
        Ok(())
    }

    /// Applies one step. Symmetry-trusted steps go through
    /// [`Checker::add_axiom`] instead.
    pub fn apply(&mut self, step: &Step) -> Result<(), &'static str> {
        match step {
            Step::Add { clause, pivot } => self.add_checked(clause, *pivot),
            Step::Delete(c) => {
                self.delete(c);
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    /// The accumulated formula contains the empty clause (or propagates to
    /// a conflict) after the last step.
    pub refuted: bool,
    pub stats: CheckStats,
}

/// Checks a step list against `f`. `trusted` steps (by index range) are
/// taken as axioms.
pub fn check_steps(
    f: &Formula,
    steps: &[Step],
    trusted: &[std::ops::Range<usize>],
) -> Result<CheckOutcome, CheckFailure> {
    let start = Instant::now();
    let mut checker = Checker::new(f);
    let mut saw_empty = false;
    for (i, step) in steps.iter().enumerate() {
        if trusted.iter().any(|r| r.contains(&i)) {
            if let Step::Add { clause, .. } = step {
                checker.add_axiom(clause);
                continue;
            }
        }
        checker.apply(step).map_err(|check| CheckFailure {
            step: i,
            clause: step.clause().to_vec(),
            reason: format!("fails {check}"),
        })?;
        if let Step::Add { clause, .. } = step {
            saw_empty |= clause.is_empty();
        }
    }
    let refuted = saw_empty && checker.is_inconsistent();
    let mut stats = checker.stats.clone();
    stats.wall = start.elapsed();
    Ok(CheckOutcome { refuted, stats })
}

/// Forward check of a segment claiming unsatisfiability: every addition
/// must be RUP or RAT and the empty clause must be derived.
pub fn rup_check_forward(f: &Formula, segment: &ProofSegment) -> Result<CheckOutcome, CheckFailure> {
    let out = check_steps(f, &segment.steps, &[])?;
    if !out.refuted {
        return Err(CheckFailure {
            step: segment.steps.len(),
            clause: Vec::new(),
            reason: "no empty clause derived".into(),
        });
    }
    Ok(out)
}

/// Stand-alone RAT test of `clause` on `pivot` against `f`.
pub fn rat_check(clause: &[Lit], f: &Formula, pivot: Lit) -> bool {
    Checker::new(f).is_rat(clause, pivot)
}

// ---------------------------------------------------------------------------
// re-encoding

fn normalized(c: &[Lit]) -> Vec<Lit> {
    let mut v = c.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Multiset difference `a - b` over normalized clauses, keeping `a`'s order.
fn clause_difference<'a>(a: &'a [Clause], b: &[Clause]) -> Vec<&'a Clause> {
    let mut counts: HashMap<Vec<Lit>, usize> = HashMap::new();
    for c in b {
        *counts.entry(normalized(c.lits())).or_default() += 1;
    }
    a.iter()
        .filter(|c| {
            let k = normalized(c.lits());
            match counts.get_mut(&k) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    false
                }
                _ => true,
            }
        })
        .collect()
}

/// The `(¬r ∨ x_members)` clauses tying each regional variable to its
/// region.
fn definition_clauses(enc: &Encoding) -> Vec<Clause> {
    let mut out = Vec::new();
    for reg in &enc.regions {
        for t in FIRST_REGIONAL_COLOR..=enc.k() {
            let mut lits = vec![enc.map.r(reg.id, t).neg()];
            lits.extend(reg.members.iter().map(|&v| enc.map.x(v, t).pos()));
            out.push(Clause::new(lits));
        }
    }
    out
}

fn pivot_for(kind: ClauseKind, clause: &Clause, enc: &Encoding) -> Result<Lit, ProofError> {
    let is_region = |l: &Lit| enc.map.decode_region(l.var()).is_some();
    let find = |pred: &dyn Fn(&Lit) -> bool| clause.lits().iter().copied().find(|l| pred(l));
    let pivot = match kind {
        ClauseKind::RegionDefinition => find(&|l| is_region(l) && !l.is_positive()),
        ClauseKind::RegionMembership => find(&|l| is_region(l) && l.is_positive()),
        ClauseKind::RegionVertex | ClauseKind::RegionRegion => find(&|l| is_region(l)),
        ClauseKind::Alod => {
            // the ALOD clause of v lists v first
            clause.lits().first().copied()
        }
        ClauseKind::Aloc | ClauseKind::Amod | ClauseKind::Center => clause.lits().first().copied(),
        other => return Err(ProofError::UnsupportedKind(other)),
    };
    pivot.ok_or_else(|| ProofError::Redundancy {
        clause: clause.to_string(),
        pivot: None,
        check: "pivot selection",
    })
}

fn kind_rank(kind: ClauseKind) -> u8 {
    match kind {
        ClauseKind::RegionDefinition => 0,
        ClauseKind::RegionMembership => 1,
        ClauseKind::RegionVertex => 2,
        ClauseKind::RegionRegion => 3,
        ClauseKind::Alod => 4,
        _ => 5,
    }
}

/// Turns the direct encoding into `optimized` (plus and/or ALOD, no
/// symmetry or chessboard clauses): temporary region definitions, every
/// new clause as a RAT addition with an explicit pivot, then deletion of
/// the clauses only the direct encoding has. Every addition is checked
/// while the segment is built, and the accumulated formula afterwards is
/// exactly `optimized`.
pub fn reencoding_proof(direct: &Encoding, optimized: &Encoding) -> Result<ProofSegment, ProofError> {
    let (dd, od) = (direct.formula.descriptor(), optimized.formula.descriptor());
    if let (Some(a), Some(b)) = (dd, od) {
        if (a.r, a.k, a.c) != (b.r, b.k, b.c) {
            return Err(ProofError::Mismatch(format!(
                "D({},{},{}) vs D({},{},{})",
                a.r, a.k, a.c, b.r, b.k, b.c
            )));
        }
    }
    if direct.map.num_vertex_vars() != optimized.map.num_vertex_vars() {
        return Err(ProofError::Mismatch("vertex variables differ".into()));
    }
    let target = optimized.formula.clauses();
    let mut kinds: HashMap<Vec<Lit>, ClauseKind> = HashMap::new();
    for (c, &k) in target.iter().zip(&optimized.kinds) {
        kinds.entry(normalized(c.lits())).or_insert(k);
    }

    let mut checker = Checker::new(&direct.formula);
    let mut steps = Vec::new();
    let add = |checker: &mut Checker, steps: &mut Vec<Step>, clause: &Clause, pivot: Lit| {
        checker
            .add_checked(clause.lits(), Some(pivot))
            .map_err(|check| ProofError::Redundancy {
                clause: clause.to_string(),
                pivot: Some(pivot),
                check,
            })?;
        steps.push(Step::add_rat(clause.lits().to_vec(), pivot));
        Ok::<(), ProofError>(())
    };

    // temporary definitions for regional variables, unless kept anyway
    let has_regions = optimized.map.num_regions() > 0 && optimized.k() >= FIRST_REGIONAL_COLOR;
    let definitions = if has_regions { definition_clauses(optimized) } else { Vec::new() };
    let kept_definitions: Vec<&Clause> = clause_difference(&definitions, &[])
        .into_iter()
        .filter(|c| kinds.contains_key(&normalized(c.lits())))
        .collect();
    for d in &definitions {
        let pivot = pivot_for(ClauseKind::RegionDefinition, d, optimized)?;
        add(&mut checker, &mut steps, d, pivot)?;
    }

    let with_defs: Vec<Clause> = direct.formula.clauses().iter().cloned().chain(definitions.iter().cloned()).collect();
    let mut new: Vec<(ClauseKind, &Clause)> = clause_difference(target, &with_defs)
        .into_iter()
        .map(|c| (kinds[&normalized(c.lits())], c))
        .collect();
    new.sort_by_key(|(k, _)| kind_rank(*k));
    for (kind, clause) in new {
        let pivot = pivot_for(kind, clause, optimized)?;
        add(&mut checker, &mut steps, clause, pivot)?;
    }

    for c in clause_difference(direct.formula.clauses(), target) {
        steps.push(Step::Delete(c.lits().to_vec()));
    }
    let kept: Vec<Clause> = kept_definitions.into_iter().cloned().collect();
    for d in clause_difference(&definitions, &kept) {
        steps.push(Step::Delete(d.lits().to_vec()));
    }
    Ok(ProofSegment::new(Provenance::Reencoding, steps))
}

// ---------------------------------------------------------------------------
// tautology

/// Resolution tree over the split's decision structure: for each top color
/// in turn either one of its regions holds it or none does. Leaves are the
/// cubes; each inner node costs one resolution per region. Returns `None`
/// when `cubes` are not the leaves of that tree.
fn tree_steps(cubes: &[Cube], layout: &CubeLayout) -> Option<Vec<Step>> {
    let present: std::collections::HashSet<Vec<Lit>> = cubes.iter().map(|c| normalized(&c.lits)).collect();
    if present.len() != cubes.len() {
        return None;
    }
    let mut steps = Vec::new();
    let mut leaves = 0usize;
    fn walk(
        layout: &CubeLayout,
        depth: usize,
        positives: &mut Vec<Lit>,
        absent: &mut Vec<usize>,
        path: &mut Vec<Lit>,
        present: &std::collections::HashSet<Vec<Lit>>,
        leaves: &mut usize,
        steps: &mut Vec<Step>,
    ) -> bool {
        let p = positives.len() as u32;
        if p == layout.max_positives || depth == layout.groups.len() {
            let mut cube = positives.clone();
            if p < layout.max_positives {
                for &g in absent.iter() {
                    cube.extend(layout.groups[g].iter().map(|v| v.neg()));
                }
            }
            *leaves += 1;
            return present.contains(&normalized(&cube));
        }
        let group = &layout.groups[depth];
        for v in group {
            positives.push(v.pos());
            path.push(v.neg());
            let ok = walk(layout, depth + 1, positives, absent, path, present, leaves, steps);
            path.pop();
            positives.pop();
            if !ok {
                return false;
            }
        }
        absent.push(depth);
        path.extend(group.iter().map(|v| v.pos()));
        let ok = walk(layout, depth + 1, positives, absent, path, present, leaves, steps);
        absent.pop();
        if !ok {
            return false;
        }
        // resolve the "absent" clause against each "present at S" clause
        let base = path.len() - group.len();
        for _ in group {
            path.remove(base);
            steps.push(Step::add(path.clone()));
        }
        true
    }
    let ok = walk(
        layout,
        0,
        &mut Vec::new(),
        &mut Vec::new(),
        &mut Vec::new(),
        &present,
        &mut leaves,
        &mut steps,
    );
    (ok && leaves == cubes.len()).then_some(steps)
}

/// Derives the empty clause from the negated cubes. With a layout whose
/// decision tree matches the cubes this is `m - 1` resolution steps;
/// otherwise the negations are refuted by the embedded solver.
pub fn tautology_proof(cubes: &[Cube], layout: Option<&CubeLayout>) -> Result<ProofSegment, ProofError> {
    if cubes.iter().any(|c| c.lits.is_empty()) {
        // the empty cube's negation already is the empty clause
        return Ok(ProofSegment::new(Provenance::Tautology, Vec::new()));
    }
    if let Some(steps) = layout.and_then(|l| tree_steps(cubes, l)) {
        return Ok(ProofSegment::new(Provenance::Tautology, steps));
    }
    let num_vars = cubes
        .iter()
        .flat_map(|c| c.lits.iter().map(|l| l.var().get()))
        .max()
        .unwrap_or(0);
    let f = Formula::with_clauses(num_vars, cubes.iter().map(Cube::negation).collect());
    let cfg = SolverConfig {
        proof: true,
        ..SolverConfig::default()
    };
    let mut s = Solver::from_formula(&f, cfg);
    if s.solve(&[]) != Status::Unsat {
        return Err(ProofError::NotTautology);
    }
    let steps = s
        .take_proof()
        .into_iter()
        .filter(|st| matches!(st, ProofStep::Add(_)))
        .map(Step::from)
        .collect();
    Ok(ProofSegment::new(Provenance::Tautology, steps))
}

// ---------------------------------------------------------------------------
// concatenation

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pipeline {
    pub steps: Vec<Step>,
    /// Index ranges of each part, in order.
    pub parts: Vec<(Provenance, std::ops::Range<usize>)>,
}

impl Pipeline {
    pub fn trusted_symmetry(&self) -> bool {
        self.parts.iter().any(|(p, r)| *p == Provenance::Symmetry && !r.is_empty())
    }

    pub fn trusted_ranges(&self) -> Vec<std::ops::Range<usize>> {
        self.parts
            .iter()
            .filter(|(p, _)| *p == Provenance::Symmetry)
            .map(|(_, r)| r.clone())
            .collect()
    }

    pub fn segment(&self) -> ProofSegment {
        ProofSegment::new(
            self.parts.last().map_or(Provenance::Tautology, |(p, _)| *p),
            self.steps.clone(),
        )
    }

    pub fn write_drat<W: Write>(&self, out: W) -> io::Result<()> {
        write_steps(out, &self.steps)
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.steps {
            h.update(s.to_string().as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize())
    }

    /// Forward check against the base formula; symmetry parts are axioms.
    pub fn check(&self, base: &Formula) -> Result<CheckOutcome, CheckFailure> {
        let out = check_steps(base, &self.steps, &self.trusted_ranges())?;
        if !out.refuted {
            return Err(CheckFailure {
                step: self.steps.len(),
                clause: Vec::new(),
                reason: "no empty clause derived".into(),
            });
        }
        Ok(out)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Concatenates parts in pipeline order: symmetry (trusted), re-encoding,
/// implication, tautology. Any part listed after a later stage is refused.
pub fn concat_pipeline(parts: Vec<ProofSegment>) -> Result<Pipeline, ProofError> {
    let mut steps = Vec::new();
    let mut ranges = Vec::new();
    let mut last: Option<Provenance> = None;
    for part in parts {
        if let Some(prev) = last {
            if part.provenance < prev {
                return Err(ProofError::Order(part.provenance, prev));
            }
        }
        last = Some(part.provenance);
        let start = steps.len();
        steps.extend(part.steps);
        ranges.push((part.provenance, start..steps.len()));
    }
    Ok(Pipeline { steps, parts: ranges })
}

// ---------------------------------------------------------------------------
// end-to-end pipeline

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub r: u32,
    pub k: u32,
    pub c: u32,
    pub alod: bool,
    /// `None` solves the optimized formula as a single empty cube.
    pub split: Option<(u32, u32, u32)>,
    pub workers: usize,
    pub seed: u64,
}

impl PipelineConfig {
    /// No ALOD, no split, one worker.
    pub fn new(r: u32, k: u32, c: u32) -> Self {
        PipelineConfig {
            r,
            k,
            c,
            alod: false,
            split: None,
            workers: 1,
            seed: 0,
        }
    }

    pub fn with_split(mut self, p: u32, t: u32, regions: u32) -> Self {
        self.split = Some((p, t, regions));
        self
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub status: SolveStatus,
    pub report: CubeRunReport,
    pub pipeline: Option<Pipeline>,
    pub check: Option<CheckOutcome>,
    pub solve_time: Duration,
    pub model: Option<Vec<bool>>,
    pub descriptor: InstanceDescriptor,
}

/// Encodes `D(r,k,c)` directly and optimized, proves the re-encoding,
/// solves the split with proof logging, proves the split tautological and
/// checks the concatenation against the direct encoding.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome, ProofError> {
    let direct = encode(cfg.r, cfg.k, cfg.c, &EncodingOptions::direct())?;
    let optimized = encode(cfg.r, cfg.k, cfg.c, &EncodingOptions::plus().with_alod(cfg.alod))?;
    let descriptor = direct.formula.descriptor().cloned().expect("encoder sets a descriptor");
    let reenc = reencoding_proof(&direct, &optimized)?;

    let (cubes, layout) = match cfg.split {
        Some((p, t, r)) => {
            let params = SplitParams::new(p, t, r, cfg.k, cfg.c);
            let layout = CubeLayout::new(&params, &optimized.regions, &optimized.map)?;
            (layout.cubes().collect::<Vec<_>>(), Some(layout))
        }
        None => (vec![Cube { index: 0, lits: Vec::new() }], None),
    };
    let opts = CubeRunOptions {
        workers: cfg.workers,
        solve: SolveOptions {
            seed: cfg.seed,
            ..SolveOptions::default()
        }
        .with_proof(),
        stop_on_sat: true,
        ..CubeRunOptions::default()
    };
    let start = Instant::now();
    let run = engine::solve_cubes(&optimized.formula, &cubes, &opts)?;
    let solve_time = start.elapsed();
    let status = run.report.status();
    if status != SolveStatus::Unsat {
        return Ok(PipelineOutcome {
            status,
            report: run.report,
            pipeline: None,
            check: None,
            solve_time,
            model: run.model,
            descriptor,
        });
    }
    let taut = tautology_proof(&cubes, layout.as_ref())?;
    let mut parts = vec![reenc];
    parts.extend(
        run.segments
            .into_iter()
            .map(|s| ProofSegment::from_solver(Provenance::Implication, s)),
    );
    parts.push(taut);
    let pipeline = concat_pipeline(parts)?;
    let check = pipeline.check(&direct.formula).map_err(|e| ProofError::Redundancy {
        clause: e.to_string(),
        pivot: None,
        check: "forward",
    })?;
    Ok(PipelineOutcome {
        status,
        report: run.report,
        pipeline: Some(pipeline),
        check: Some(check),
        solve_time,
        model: None,
        descriptor,
    })
}

// ---------------------------------------------------------------------------
// bound certificates

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorBound {
    /// Known lower bound on the packing chromatic number of the grid.
    pub value: u32,
    pub source: String,
}

/// What a certificate rests on: a checked refutation of `D(r,k,c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnsatEvidence {
    pub r: u32,
    pub k: u32,
    pub c: u32,
    /// SHA-256 of the DRAT text.
    pub proof_digest: String,
    pub checked: bool,
    pub trusted_symmetry: bool,
}

impl UnsatEvidence {
    pub fn from_pipeline(desc: &InstanceDescriptor, pipeline: &Pipeline, check: &CheckOutcome) -> Self {
        UnsatEvidence {
            r: desc.r,
            k: desc.k,
            c: desc.c,
            proof_digest: pipeline.digest(),
            checked: check.refuted,
            trusted_symmetry: pipeline.trusted_symmetry(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub r: u32,
    pub k: u32,
    pub c: u32,
    pub prior: PriorBound,
    /// The certified lower bound, `k + 1`.
    pub lower_bound: u32,
    pub conclusion: String,
    pub argument: String,
    pub evidence: UnsatEvidence,
}

impl BoundCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// If `D(r,k,c)` is unsatisfiable with `c <= k` and the packing chromatic
/// number of the grid is known to be at least `k`, it is at least `k + 1`.
pub fn certify_bound(
    r: u32,
    k: u32,
    c: u32,
    prior: PriorBound,
    evidence: &UnsatEvidence,
) -> Result<BoundCertificate, ProofError> {
    if c == 0 || c > k {
        return Err(ProofError::Refused(format!("center color {c} is not in 1..={k}")));
    }
    if prior.value < k {
        return Err(ProofError::Refused(format!(
            "prior bound {} is below k = {k}",
            prior.value
        )));
    }
    if (evidence.r, evidence.k, evidence.c) != (r, k, c) {
        return Err(ProofError::Refused(format!(
            "evidence is about D({},{},{}), not D({r},{k},{c})",
            evidence.r, evidence.k, evidence.c
        )));
    }
    if !evidence.checked {
        return Err(ProofError::Refused("the refutation has not been checked".into()));
    }
    let argument = format!(
        "Suppose the grid had a packing {k}-coloring. Since the packing chromatic number is at least \
         {k}, color {k} is used. If color {c} is used at some vertex v, the coloring restricted to the \
         radius-{r} diamond around v satisfies D({r},{k},{c}). Otherwise recolor every {k} to {c}: \
         with {c} < {k} no conflict arises, and the result is a packing {}-coloring, contradicting the \
         prior bound. Both cases contradict the refutation of D({r},{k},{c}).",
        k - 1
    );
    Ok(BoundCertificate {
        r,
        k,
        c,
        lower_bound: k + 1,
        conclusion: format!("chi_rho(Z^2) >= {}", k + 1),
        argument,
        prior,
        evidence: evidence.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Var;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    fn formula(n: u32, cls: &[&[i32]]) -> Formula {
        Formula::with_clauses(n, cls.iter().map(|c| Clause::new(lits(c))).collect())
    }

    fn toy_layout(p: u32, t: u32, r: u32) -> CubeLayout {
        let mut next = 0;
        CubeLayout {
            max_positives: p,
            groups: (0..t)
                .map(|_| {
                    (0..r)
                        .map(|_| {
                            next += 1;
                            Var(next)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn drat_roundtrip() {
        let steps = vec![
            Step::add(lits(&[1, -2])),
            Step::Delete(lits(&[3])),
            Step::add(vec![]),
        ];
        let seg = ProofSegment::new(Provenance::Implication, steps.clone());
        let text = seg.to_drat();
        assert_eq!(text, "1 -2 0\nd 3 0\n0\n");
        assert_eq!(parse_drat_str(&text).unwrap(), steps);
        assert!(parse_drat_str("1 2").is_err());
    }

    #[test]
    fn pivot_goes_first_in_text() {
        let s = Step::add_rat(lits(&[1, -7, 3]), Lit::from_dimacs(-7).unwrap());
        assert_eq!(s.to_string(), "-7 1 3 0");
    }

    #[test]
    fn rat_basics() {
        // fresh literal: nothing to resolve with
        assert!(rat_check(&lits(&[3]), &formula(3, &[&[1, 2]]), Lit::from_dimacs(3).unwrap()));
        // (-1 -3) on -1 against (1 2), (2 -3 ...): resolvent (2 -3) not implied
        let g = formula(3, &[&[1, 2]]);
        assert!(!rat_check(&lits(&[-1, -3]), &g, Lit::from_dimacs(-1).unwrap()));
        let h = formula(3, &[&[1, 2], &[2, -3]]);
        assert!(rat_check(&lits(&[-1, -3]), &h, Lit::from_dimacs(-1).unwrap()));
    }

    #[test]
    fn broken_dependency_is_caught() {
        // x1 ∨ x2, x1 ∨ ¬x2, ¬x1 ∨ x3, ¬x1 ∨ ¬x3
        let f = formula(3, &[&[1, 2], &[1, -2], &[-1, 3], &[-1, -3]]);
        let good = ProofSegment::new(Provenance::Implication, vec![Step::add(lits(&[1])), Step::add(vec![])]);
        assert!(rup_check_forward(&f, &good).is_ok());
        let broken = ProofSegment::new(
            Provenance::Implication,
            vec![Step::add(lits(&[1])), Step::Delete(lits(&[1])), Step::Delete(lits(&[1, 2])), Step::add(vec![])],
        );
        let err = rup_check_forward(&f, &broken).unwrap_err();
        assert_eq!(err.step, 3);
        let empty = ProofSegment::new(Provenance::Implication, vec![]);
        assert!(rup_check_forward(&f, &empty).is_err());
    }

    #[test]
    fn deleting_a_reason_recomputes_units() {
        // units via (1) and (-1 2); deleting (-1 2) must forget 2
        let f = formula(2, &[&[1], &[-1, 2]]);
        let mut c = Checker::new(&f);
        assert!(c.is_rup(&lits(&[2])));
        assert!(c.delete(&lits(&[2, -1])));
        assert!(!c.is_rup(&lits(&[2])));
        assert!(!c.delete(&lits(&[2, -1])));
    }

    #[test]
    fn solver_proofs_check() {
        let enc = encode(3, 6, 3, &EncodingOptions::direct()).unwrap();
        let r = engine::solve(&enc.formula, &[], &SolveOptions::default().with_proof()).unwrap();
        assert_eq!(r.status, SolveStatus::Unsat);
        let seg = ProofSegment::from_solver(Provenance::Implication, r.proof.unwrap());
        let out = rup_check_forward(&enc.formula, &seg).unwrap();
        assert!(out.refuted);
    }

    #[test]
    fn tautology_tree_sizes() {
        let l = toy_layout(1, 1, 2);
        let cubes: Vec<Cube> = l.cubes().collect();
        let seg = tautology_proof(&cubes, Some(&l)).unwrap();
        assert_eq!(seg.steps, vec![Step::add(lits(&[2])), Step::add(vec![])]);

        let l = toy_layout(2, 2, 3);
        let cubes: Vec<Cube> = l.cubes().collect();
        assert_eq!(tautology_proof(&cubes, Some(&l)).unwrap().additions(), 15);

        let single = [Cube { index: 0, lits: vec![] }];
        assert!(tautology_proof(&single, None).unwrap().steps.is_empty());
    }

    #[test]
    fn tautology_proofs_check() {
        for t in 1..=3 {
            for p in 0..=t {
                for r in 1..=3 {
                    let l = toy_layout(p, t, r);
                    let cubes: Vec<Cube> = l.cubes().collect();
                    let negs = Formula::with_clauses(t * r, cubes.iter().map(Cube::negation).collect());
                    for layout in [Some(&l), None] {
                        let seg = tautology_proof(&cubes, layout).unwrap();
                        if cubes.iter().any(|c| c.lits.is_empty()) {
                            continue;
                        }
                        assert!(rup_check_forward(&negs, &seg).is_ok(), "P={p} T={t} R={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_tautology_is_refused() {
        let l = toy_layout(1, 1, 2);
        let cubes: Vec<Cube> = l.cubes().take(2).collect();
        assert!(matches!(tautology_proof(&cubes, Some(&l)), Err(ProofError::NotTautology)));
    }

    #[test]
    fn reencoding_reaches_the_plus_formula() {
        for (r, k, c, alod) in [(3, 6, 3, false), (3, 7, 3, true), (4, 8, 4, true)] {
            let direct = encode(r, k, c, &EncodingOptions::direct()).unwrap();
            let plus = encode(r, k, c, &EncodingOptions::plus().with_alod(alod)).unwrap();
            let seg = reencoding_proof(&direct, &plus).unwrap();
            let mut checker = Checker::new(&direct.formula);
            for s in &seg.steps {
                checker.apply(s).unwrap();
            }
            let mut want: Vec<Vec<Lit>> = plus.formula.clauses().iter().map(|c| normalized(c.lits())).collect();
            want.sort();
            assert_eq!(checker.clauses(), want, "D({r},{k},{c})");
        }
    }

    #[test]
    fn symmetry_is_not_reencodable() {
        let direct = encode(3, 7, 3, &EncodingOptions::direct()).unwrap();
        let sym = encode(3, 7, 3, &EncodingOptions::plus().with_symmetry(vec![7])).unwrap();
        assert!(matches!(
            reencoding_proof(&direct, &sym),
            Err(ProofError::UnsupportedKind(ClauseKind::Symmetry))
        ));
    }

    #[test]
    fn order_is_enforced() {
        let t = ProofSegment::new(Provenance::Tautology, vec![]);
        let i = ProofSegment::new(Provenance::Implication, vec![]);
        assert!(concat_pipeline(vec![i.clone(), t.clone()]).is_ok());
        assert!(matches!(concat_pipeline(vec![t, i]), Err(ProofError::Order(..))));
    }

    #[test]
    fn small_pipeline_and_certificate() {
        let out = run_pipeline(&PipelineConfig {
            r: 3,
            k: 6,
            c: 3,
            alod: false,
            split: Some((1, 1, 1)),
            workers: 1,
            seed: 0,
        })
        .unwrap();
        assert_eq!(out.status, SolveStatus::Unsat);
        let pipeline = out.pipeline.unwrap();
        let check = out.check.unwrap();
        assert!(check.refuted);
        let ev = UnsatEvidence::from_pipeline(&out.descriptor, &pipeline, &check);
        let prior = PriorBound {
            value: 6,
            source: "literature".into(),
        };
        let cert = certify_bound(3, 6, 3, prior.clone(), &ev).unwrap();
        assert_eq!(cert.lower_bound, 7);
        assert_eq!(BoundCertificate::from_json(&cert.to_json()).unwrap(), cert);
        // monotone in the prior bound
        let higher = PriorBound { value: 9, ..prior.clone() };
        assert!(certify_bound(3, 6, 3, higher, &ev).is_ok());
        assert!(certify_bound(3, 6, 7, prior.clone(), &ev).is_err());
        let low = PriorBound { value: 5, ..prior };
        assert!(certify_bound(3, 6, 3, low, &ev).is_err());
    }

    #[test]
    fn sat_pipeline_stops() {
        let out = run_pipeline(&PipelineConfig {
            r: 3,
            k: 7,
            c: 3,
            alod: false,
            split: None,
            workers: 1,
            seed: 0,
        })
        .unwrap();
        assert_eq!(out.status, SolveStatus::Sat);
        assert!(out.pipeline.is_none());
    }
}
