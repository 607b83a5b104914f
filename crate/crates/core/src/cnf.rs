//! Propositional layer: literals, clauses, formulas, the variable map and
//! DIMACS / iCNF serialization.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::ops::Not;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Diamond, Vertex};

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }

    /// Zero-based index, handy for dense arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

/// A literal in DIMACS convention: `v` or `-v`, never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(value: i32) -> Option<Lit> {
        (value != 0 && value != i32::MIN).then_some(Lit(value))
    }

    pub fn new(var: Var, positive: bool) -> Lit {
        if positive {
            var.pos()
        } else {
            var.neg()
        }
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    /// Dense code `2·(v-1) + sign`, used by the solver and checker.
    pub fn code(self) -> usize {
        (self.var().index() << 1) | usize::from(self.0 < 0)
    }

    pub fn from_code(code: usize) -> Lit {
        let v = (code >> 1) as i32 + 1;
        Lit(if code & 1 == 1 { -v } else { v })
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Self {
        Clause(lits)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn unit(lit: Lit) -> Self {
        Clause(vec![lit])
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

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.contains(&lit)
    }

    pub fn is_tautology(&self) -> bool {
        self.0.iter().any(|&l| self.0.contains(&!l))
    }

    pub fn has_duplicates(&self) -> bool {
        let mut s = self.0.clone();
        s.sort_unstable();
        s.windows(2).any(|w| w[0] == w[1])
    }

    /// Sorted copy without duplicate literals; used as a set key.
    pub fn normalized(&self) -> Clause {
        let mut s = self.0.clone();
        s.sort_unstable();
        s.dedup();
        Clause(s)
    }

    pub fn max_var(&self) -> u32 {
        self.0.iter().map(|l| l.var().get()).max().unwrap_or(0)
    }

    pub fn into_lits(self) -> Vec<Lit> {
        self.0
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        Clause(iter.into_iter().collect())
    }
}

impl From<Vec<Lit>> for Clause {
    fn from(lits: Vec<Lit>) -> Self {
        Clause(lits)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

/// Which encoding produced a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Direct,
    Plus,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Direct => "direct",
            Variant::Plus => "plus",
        })
    }
}

/// Everything needed to regenerate an encoded instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub variant: Variant,
    pub r: u32,
    pub k: u32,
    pub c: u32,
    pub alod: bool,
    pub symmetry_layers: Vec<u32>,
    pub chessboard: bool,
    pub region_definitions: bool,
    pub region_centers: Vec<Vertex>,
}

impl InstanceDescriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Clause>,
    descriptor: Option<InstanceDescriptor>,
}

impl Formula {
    pub fn new(num_vars: u32) -> Self {
        Formula {
            num_vars,
            clauses: Vec::new(),
            descriptor: None,
        }
    }

    pub fn with_clauses(num_vars: u32, clauses: Vec<Clause>) -> Self {
        Formula {
            num_vars,
            clauses,
            descriptor: None,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn descriptor(&self) -> Option<&InstanceDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn descriptor_mut(&mut self) -> Option<&mut InstanceDescriptor> {
        self.descriptor.as_mut()
    }

    pub fn set_descriptor(&mut self, d: InstanceDescriptor) {
        self.descriptor = Some(d);
    }

    pub fn push(&mut self, clause: Clause) {
        debug_assert!(clause.max_var() <= self.num_vars);
        self.clauses.push(clause);
    }

    pub fn extend<I: IntoIterator<Item = Clause>>(&mut self, clauses: I) {
        for c in clauses {
            self.push(c);
        }
    }

    /// Raises the variable count, never lowers it.
    pub fn ensure_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    /// Every literal references a declared variable.
    pub fn check_vars(&self) -> bool {
        self.clauses.iter().all(|c| c.max_var() <= self.num_vars)
    }

    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        write_clauses(&mut out, &self.clauses)
    }

    pub fn to_dimacs(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to memory");
        buf
    }

    /// `p inccnf`, the clauses, then one `a <lits> 0` line per cube.
    pub fn write_icnf<'a, W, I>(&self, mut out: W, cubes: I) -> io::Result<()>
    where
        W: Write,
        I: IntoIterator<Item = &'a [Lit]>,
    {
        writeln!(out, "p inccnf")?;
        write_clauses(&mut out, &self.clauses)?;
        for cube in cubes {
            out.write_all(b"a ")?;
            for l in cube {
                write!(out, "{l} ")?;
            }
            out.write_all(b"0\n")?;
        }
        Ok(())
    }
}

fn write_clauses<W: Write>(out: &mut W, clauses: &[Clause]) -> io::Result<()> {
    let mut line = String::new();
    for c in clauses {
        line.clear();
        for l in c.lits() {
            line.push_str(&l.dimacs().to_string());
            line.push(' ');
        }
        line.push_str("0\n");
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("no variable for vertex {vertex} and color {color}")]
    UnknownVertexVar { vertex: Vertex, color: u32 },
    #[error("no variable for region {region} and color {color}")]
    UnknownRegionVar { region: usize, color: u32 },
}

fn perr(line: usize, msg: impl Into<String>) -> CnfError {
    CnfError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads DIMACS CNF, validating the header against the body.
pub fn parse_dimacs<R: BufRead>(input: R) -> Result<Formula, CnfError> {
    let mut header: Option<(u32, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(perr(lineno, "duplicate header"));
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(perr(lineno, format!("malformed header `{t}`")));
            }
            let vars = f[2]
                .parse::<u32>()
                .map_err(|_| perr(lineno, format!("bad variable count `{}`", f[2])))?;
            let n = f[3]
                .parse::<usize>()
                .map_err(|_| perr(lineno, format!("bad clause count `{}`", f[3])))?;
            header = Some((vars, n, lineno));
            continue;
        }
        let Some((vars, _, _)) = header else {
            return Err(perr(lineno, "clause before header"));
        };
        for tok in t.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| perr(lineno, format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(Clause::new(std::mem::take(&mut current)));
            } else {
                if v.unsigned_abs() > vars as u64 {
                    return Err(perr(
                        lineno,
                        format!("literal {v} exceeds declared variable count {vars}"),
                    ));
                }
                current.push(Lit(v as i32));
            }
        }
    }
    let Some((vars, n, hline)) = header else {
        return Err(perr(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(perr(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != n {
        return Err(perr(
            hline,
            format!("header declares {n} clauses, body has {}", clauses.len()),
        ));
    }
    Ok(Formula::with_clauses(vars, clauses))
}

pub fn parse_dimacs_str(text: &str) -> Result<Formula, CnfError> {
    parse_dimacs(text.as_bytes())
}

/// Reads an iCNF file: the formula and its `a` cube lines.
pub fn parse_icnf<R: BufRead>(input: R) -> Result<(Formula, Vec<Vec<Lit>>), CnfError> {
    let mut clauses = Vec::new();
    let mut cubes = Vec::new();
    let mut saw_header = false;
    let mut max_var = 0;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('p') {
            if t.split_whitespace().collect::<Vec<_>>() != ["p", "inccnf"] {
                return Err(perr(lineno, format!("malformed header `{t}`")));
            }
            saw_header = true;
            continue;
        }
        if !saw_header {
            return Err(perr(lineno, "missing `p inccnf` header"));
        }
        let (is_cube, body) = match t.strip_prefix('a') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in body.split_whitespace() {
            let v: i32 = tok
                .parse()
                .map_err(|_| perr(lineno, format!("bad literal `{tok}`")))?;
            if v == 0 {
                terminated = true;
                break;
            }
            max_var = max_var.max(v.unsigned_abs());
            lits.push(Lit(v));
        }
        if !terminated {
            return Err(perr(lineno, "line is not terminated by 0"));
        }
        if is_cube {
            cubes.push(lits);
        } else {
            clauses.push(Clause::new(lits));
        }
    }
    Ok((Formula::with_clauses(max_var, clauses), cubes))
}

/// Smallest regional color: colors 1..=3 never get regional variables.
pub const FIRST_REGIONAL_COLOR: u32 = 4;

/// Deterministic numbering of vertex variables `x(v, t)` and regional
/// variables `r(S, t)`.
///
/// Vertex variables come first: `id = index(v)·k + t`, with `index` the
/// canonical diamond order. Regional variables follow, ordered by
/// `(region, color)` for colors `4..=k`.
#[derive(Debug, Clone)]
pub struct VarMap {
    diamond: Diamond,
    k: u32,
    regions: usize,
}

impl VarMap {
    pub fn new(diamond: Diamond, k: u32, regions: usize) -> Self {
        let regions = if k >= FIRST_REGIONAL_COLOR { regions } else { 0 };
        VarMap {
            diamond,
            k,
            regions,
        }
    }

    pub fn diamond(&self) -> &Diamond {
        &self.diamond
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_regions(&self) -> usize {
        self.regions
    }

    pub fn num_vertex_vars(&self) -> u32 {
        self.diamond.len() as u32 * self.k
    }

    fn colors_per_region(&self) -> u32 {
        self.k.saturating_sub(FIRST_REGIONAL_COLOR - 1)
    }

    pub fn num_region_vars(&self) -> u32 {
        self.regions as u32 * self.colors_per_region()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vertex_vars() + self.num_region_vars()
    }

    pub fn vertex_var(&self, v: Vertex, t: u32) -> Result<Var, CnfError> {
        match self.diamond.index_of(v) {
            Some(i) if (1..=self.k).contains(&t) => Ok(Var(i as u32 * self.k + t)),
            _ => Err(CnfError::UnknownVertexVar {
                vertex: v,
                color: t,
            }),
        }
    }

    /// Like [`VarMap::vertex_var`] for callers that already know `(v, t)` is
    /// in range.
    pub fn x(&self, v: Vertex, t: u32) -> Var {
        self.vertex_var(v, t).expect("vertex variable in range")
    }

    /// Vertex variable by canonical index.
    pub fn x_at(&self, index: usize, t: u32) -> Var {
        debug_assert!(index < self.diamond.len() && (1..=self.k).contains(&t));
        Var(index as u32 * self.k + t)
    }

    pub fn region_var(&self, region: usize, t: u32) -> Result<Var, CnfError> {
        if region < self.regions && (FIRST_REGIONAL_COLOR..=self.k).contains(&t) {
            Ok(Var(self.num_vertex_vars()
                + region as u32 * self.colors_per_region()
                + (t - FIRST_REGIONAL_COLOR + 1)))
        } else {
            Err(CnfError::UnknownRegionVar { region, color: t })
        }
    }

    pub fn r(&self, region: usize, t: u32) -> Var {
        self.region_var(region, t).expect("region variable in range")
    }

    /// Inverse lookup for vertex variables: `(vertex, color)`.
    pub fn decode_vertex(&self, var: Var) -> Option<(Vertex, u32)> {
        if var.0 == 0 || var.0 > self.num_vertex_vars() {
            return None;
        }
        let z = var.0 - 1;
        let idx = (z / self.k) as usize;
        Some((self.diamond.vertices()[idx], z % self.k + 1))
    }

    /// Inverse lookup for regional variables: `(region, color)`.
    pub fn decode_region(&self, var: Var) -> Option<(usize, u32)> {
        let base = self.num_vertex_vars();
        if var.0 <= base || var.0 > self.num_vars() {
            return None;
        }
        let z = var.0 - base - 1;
        let per = self.colors_per_region();
        Some(((z / per) as usize, z % per + FIRST_REGIONAL_COLOR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i32) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    #[test]
    fn literal_codes_round_trip() {
        for v in [1, -1, 2, -7, 1000] {
            let l = lit(v);
            assert_eq!(Lit::from_code(l.code()), l);
            assert_eq!((!l).code(), l.code() ^ 1);
        }
        assert!(Lit::from_dimacs(0).is_none());
    }

    #[test]
    fn empty_formula_header() {
        assert_eq!(Formula::new(0).to_dimacs(), b"p cnf 0 0\n");
    }

    #[test]
    fn dimacs_body_format() {
        let f = Formula::with_clauses(3, vec![vec![lit(1), lit(-3)].into(), Clause::empty()]);
        assert_eq!(
            String::from_utf8(f.to_dimacs()).unwrap(),
            "p cnf 3 2\n1 -3 0\n0\n"
        );
    }

    #[test]
    fn parse_unit() {
        let f = parse_dimacs_str("p cnf 1 1\n1 0\n").unwrap();
        assert_eq!(f.num_vars(), 1);
        assert_eq!(f.clauses(), &[Clause::unit(lit(1))]);
    }

    #[test]
    fn parse_multiline_clause_and_comments() {
        let f = parse_dimacs_str("c hi\np cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clauses()[0].len(), 3);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_dimacs_str("p cnf 2 3\n1 0\n2 0\n").unwrap_err();
        assert!(matches!(err, CnfError::Parse { line: 1, .. }), "{err}");
        let err = parse_dimacs_str("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert!(matches!(err, CnfError::Parse { line: 2, .. }), "{err}");
        let err = parse_dimacs_str("p cnf 2 1\n3 0\n").unwrap_err();
        assert!(matches!(err, CnfError::Parse { line: 2, .. }), "{err}");
        assert!(parse_dimacs_str("1 0\n").is_err());
        assert!(parse_dimacs_str("p cnf 2 1\n1 2\n").is_err());
        assert!(parse_dimacs_str("p dnf 2 1\n1 0\n").is_err());
    }

    #[test]
    fn icnf_layout() {
        let f = Formula::with_clauses(2, vec![vec![lit(1), lit(2)].into()]);
        let cubes = [vec![lit(1)], vec![lit(-1), lit(-2)]];
        let mut buf = Vec::new();
        f.write_icnf(&mut buf, cubes.iter().map(|c| c.as_slice())).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "p inccnf\n1 2 0\na 1 0\na -1 -2 0\n");
        let (g, back) = parse_icnf(text.as_bytes()).unwrap();
        assert_eq!(g.clauses(), f.clauses());
        assert_eq!(back, cubes);

        let mut buf = Vec::new();
        f.write_icnf(&mut buf, std::iter::empty()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p inccnf\n1 2 0\n");
    }

    #[test]
    fn varmap_numbering() {
        let m = VarMap::new(Diamond::new(5), 10, 9);
        assert_eq!(m.x(m.diamond().vertices()[0], 1), Var(1));
        assert_eq!(m.num_vertex_vars(), 610);
        let last = *m.diamond().vertices().last().unwrap();
        assert_eq!(m.x(last, 10), Var(610));
        assert_eq!(m.num_region_vars(), 63);
        assert_eq!(m.num_vars(), 673);
        assert_eq!(m.r(0, 4), Var(611));
        assert_eq!(m.r(8, 10), Var(673));
        assert!(m.vertex_var(Vertex::new(6, 0), 1).is_err());
        assert!(m.vertex_var(Vertex::ORIGIN, 11).is_err());
        assert!(m.region_var(0, 3).is_err());
        assert!(m.region_var(9, 4).is_err());

        let m6 = VarMap::new(Diamond::new(6), 11, 13);
        assert_eq!(m6.num_vertex_vars(), 935);
        assert_eq!(m6.num_region_vars(), 104);
        assert_eq!(m6.num_vars(), 1039);

        let single = VarMap::new(Diamond::new(1), 4, 1);
        assert_eq!(single.num_region_vars(), 1);
    }

    #[test]
    fn varmap_decoding_inverts_lookup() {
        let m = VarMap::new(Diamond::new(3), 7, 1);
        for id in 1..=m.num_vars() {
            let var = Var(id);
            if let Some((v, t)) = m.decode_vertex(var) {
                assert_eq!(m.x(v, t), var);
            } else {
                let (s, t) = m.decode_region(var).unwrap();
                assert_eq!(m.r(s, t), var);
            }
        }
    }
}
