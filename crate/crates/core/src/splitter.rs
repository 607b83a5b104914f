//! PTR cube generation.
//!
//! A split is driven by three numbers: at most `P` positive literals per
//! cube, the `T` highest usable colors and the `R` regions closest to the
//! center. Cubes are produced lazily, so even the five-million-cube splits
//! never sit in memory at once.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, Formula, Lit, Var, VarMap, FIRST_REGIONAL_COLOR};
use crate::encoder::Region;
use crate::solver::{Solver, SolverConfig, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("P = {p} exceeds T = {t}")]
    TooManyPositives { p: u32, t: u32 },
    #[error("T = {t} exceeds k = {k}")]
    TooManyColors { t: u32, k: u32 },
    #[error("R = {requested} exceeds the {available} available regions")]
    TooManyRegions { requested: u32, available: usize },
    #[error("center color {c} outside 1..={k}")]
    CenterColor { c: u32, k: u32 },
    #[error("top color {0} has no regional variables")]
    NoRegionalColor(u32),
    #[error("variable map has {have} regions, split needs {need}")]
    MapMismatch { have: usize, need: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitParams {
    pub p: u32,
    pub t: u32,
    pub r: u32,
    pub k: u32,
    pub c: u32,
}

impl SplitParams {
    pub fn new(p: u32, t: u32, r: u32, k: u32, c: u32) -> Self {
        SplitParams { p, t, r, k, c }
    }

    pub fn validate(&self, available_regions: usize) -> Result<(), SplitError> {
        if self.p > self.t {
            return Err(SplitError::TooManyPositives { p: self.p, t: self.t });
        }
        if self.c == 0 || self.c > self.k {
            return Err(SplitError::CenterColor { c: self.c, k: self.k });
        }
        if self.t > self.k {
            return Err(SplitError::TooManyColors { t: self.t, k: self.k });
        }
        if self.r as usize > available_regions {
            return Err(SplitError::TooManyRegions {
                requested: self.r,
                available: available_regions,
            });
        }
        if let Some(&low) = self.top_colors().iter().min() {
            if low < FIRST_REGIONAL_COLOR {
                return Err(SplitError::NoRegionalColor(low));
            }
        }
        Ok(())
    }

    /// `k, k-1, ..., k-T+1`, with the center color swapped for `k-T`.
    pub fn top_colors(&self) -> Vec<u32> {
        let mut top: Vec<u32> = (0..self.t).map(|i| self.k - i).collect();
        if let Some(pos) = top.iter().position(|&q| q == self.c) {
            top.remove(pos);
            top.push(self.k - self.t);
        }
        top
    }
}

/// One case of the split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub index: u64,
    /// Positive literals first, then negatives.
    pub lits: Vec<Lit>,
}

impl Cube {
    pub fn positives(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied().filter(|l| l.is_positive())
    }

    pub fn negatives(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied().filter(|l| !l.is_positive())
    }

    /// The clause asserting that this case does not happen.
    pub fn negation(&self) -> Clause {
        self.lits.iter().map(|&l| !l).collect()
    }
}

impl AsRef<[Lit]> for Cube {
    fn as_ref(&self) -> &[Lit] {
        &self.lits
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a")?;
        for l in &self.lits {
            write!(f, " {l}")?;
        }
        f.write_str(" 0")
    }
}

/// The regions used for splitting: closest to the center first (by the
/// smallest member norm), ties broken by center coordinates.
pub fn closest_regions(regions: &[Region], count: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..regions.len()).collect();
    ids.sort_by_key(|&i| {
        let reg = &regions[i];
        (reg.distance_to_origin(), reg.center.x, reg.center.y)
    });
    ids.truncate(count);
    ids
}

/// The variables a split talks about: one group per top color (in split
/// order) holding that color's regional variables for the closest regions.
/// Cube generation and the tautology proof only need this shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeLayout {
    pub max_positives: u32,
    pub groups: Vec<Vec<Var>>,
}

impl CubeLayout {
    pub fn new(params: &SplitParams, regions: &[Region], map: &VarMap) -> Result<Self, SplitError> {
        params.validate(regions.len())?;
        if map.num_regions() < regions.len() {
            return Err(SplitError::MapMismatch {
                have: map.num_regions(),
                need: regions.len(),
            });
        }
        let nv = closest_regions(regions, params.r as usize);
        let groups = params
            .top_colors()
            .into_iter()
            .map(|q| nv.iter().map(|&s| map.r(regions[s].id, q)).collect())
            .collect();
        Ok(CubeLayout {
            max_positives: params.p,
            groups,
        })
    }

    pub fn width(&self) -> usize {
        self.groups.first().map_or(0, Vec::len)
    }

    pub fn count(&self) -> u128 {
        count_cubes(self.max_positives, self.groups.len() as u32, self.width() as u32)
    }

    pub fn cubes(&self) -> PtrCubes<'_> {
        PtrCubes::new(self)
    }

    pub fn variables(&self) -> Vec<Var> {
        self.groups.iter().flatten().copied().collect()
    }
}

/// `sum_{i=0}^{P} R^i * C(T, i)`.
pub fn count_cubes(p: u32, t: u32, r: u32) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow = 1u128;
    for i in 0..=p.min(t) {
        total += binom * pow;
        binom = binom * u128::from(t - i) / u128::from(i + 1);
        pow *= u128::from(r);
    }
    total
}

/// Streaming cube generator: descending number of positives, color subsets
/// in lexicographic order, region tuples in row-major order.
pub struct PtrCubes<'a> {
    layout: &'a CubeLayout,
    p: u32,
    subset: Vec<usize>,
    tuple: Vec<usize>,
    index: u64,
    done: bool,
}

impl<'a> PtrCubes<'a> {
    fn new(layout: &'a CubeLayout) -> Self {
        let p = layout.max_positives.min(layout.groups.len() as u32);
        let mut it = PtrCubes {
            layout,
            p,
            subset: (0..p as usize).collect(),
            tuple: vec![0; p as usize],
            index: 0,
            done: false,
        };
        // positives need at least one region to pick from
        if p > 0 && layout.width() == 0 {
            it.skip_to_level(0);
        }
        it
    }

    fn skip_to_level(&mut self, p: u32) {
        self.p = p;
        self.subset = (0..p as usize).collect();
        self.tuple = vec![0; p as usize];
    }

    fn current(&self) -> Cube {
        let l = self.layout;
        let mut lits = Vec::new();
        for (j, &g) in self.subset.iter().enumerate() {
            lits.push(l.groups[g][self.tuple[j]].pos());
        }
        if self.p < l.max_positives {
            for (g, vars) in l.groups.iter().enumerate() {
                if !self.subset.contains(&g) {
                    lits.extend(vars.iter().map(|v| v.neg()));
                }
            }
        }
        Cube {
            index: self.index,
            lits,
        }
    }

    fn advance(&mut self) {
        let width = self.layout.width();
        let n = self.layout.groups.len();
        // next tuple
        for j in (0..self.tuple.len()).rev() {
            if self.tuple[j] + 1 < width {
                self.tuple[j] += 1;
                for t in &mut self.tuple[j + 1..] {
                    *t = 0;
                }
                return;
            }
        }
        for t in &mut self.tuple {
            *t = 0;
        }
        // next subset
        let p = self.subset.len();
        for j in (0..p).rev() {
            if self.subset[j] < n - p + j {
                self.subset[j] += 1;
                for i in j + 1..p {
                    self.subset[i] = self.subset[i - 1] + 1;
                }
                return;
            }
        }
        if self.p == 0 {
            self.done = true;
        } else {
            self.skip_to_level(self.p - 1);
        }
    }
}

impl Iterator for PtrCubes<'_> {
    type Item = Cube;

    fn next(&mut self) -> Option<Cube> {
        if self.done {
            return None;
        }
        let cube = self.current();
        self.index += 1;
        self.advance();
        Some(cube)
    }
}

/// Convenience wrapper: layout plus stream in one call.
pub fn ptr_cubes(params: &SplitParams, regions: &[Region], map: &VarMap) -> Result<Vec<Cube>, SplitError> {
    Ok(CubeLayout::new(params, regions, map)?.cubes().collect())
}

fn involved_vars<C: AsRef<[Lit]>>(cubes: &[C]) -> Vec<Var> {
    let mut vars: Vec<Var> = cubes
        .iter()
        .flat_map(|c| c.as_ref().iter().map(|l| l.var()))
        .collect();
    vars.sort();
    vars.dedup();
    vars
}

/// Largest number of variables the brute-force check will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Enumerates every assignment of the involved variables. `None` when there
/// are more than [`BRUTE_FORCE_LIMIT`] of them.
pub fn tautology_brute_force<C: AsRef<[Lit]>>(cubes: &[C]) -> Option<bool> {
    let vars = involved_vars(cubes);
    if vars.len() > BRUTE_FORCE_LIMIT {
        return None;
    }
    let bit: HashMap<Var, u32> = vars.iter().enumerate().map(|(i, &v)| (v, 1 << i)).collect();
    let masks: Vec<(u32, u32)> = cubes
        .iter()
        .map(|c| {
            c.as_ref().iter().fold((0, 0), |(pos, neg), l| {
                let b = bit[&l.var()];
                if l.is_positive() {
                    (pos | b, neg)
                } else {
                    (pos, neg | b)
                }
            })
        })
        .collect();
    Some((0..1u32 << vars.len()).all(|a| masks.iter().any(|&(pos, neg)| a & pos == pos && a & neg == 0)))
}

/// The cubes form a tautology iff the conjunction of their negations is
/// unsatisfiable.
pub fn tautology_by_negation<C: AsRef<[Lit]>>(cubes: &[C]) -> bool {
    let num_vars = involved_vars(cubes).last().map_or(0, |v| v.get());
    let clauses = cubes.iter().map(|c| c.as_ref().iter().map(|&l| !l).collect()).collect();
    let f = Formula::with_clauses(num_vars, clauses);
    Solver::from_formula(&f, SolverConfig::default()).solve(&[]) == Status::Unsat
}

/// Brute force where feasible, the negation check otherwise.
pub fn check_tautology<C: AsRef<[Lit]>>(cubes: &[C]) -> bool {
    tautology_brute_force(cubes).unwrap_or_else(|| tautology_by_negation(cubes))
}
