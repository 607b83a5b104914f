//! CNF encodings of `D(r, k, c)`.
//!
//! The *direct* encoding has one variable `x(v, t)` per vertex and color and
//! three clause kinds: at-least-one-color (ALOC) per vertex, a binary
//! at-most-one-distance (AMOD) clause for every color `t` and pair of vertices
//! at distance at most `t`, and the center unit.
//!
//! The *plus* encoding keeps colors 1..=3 as they are and, for every color
//! `t ≥ 4`, groups vertices into disjoint `+`-shaped regions with a regional
//! variable `r(S, t)` ("some vertex of `S` has color `t`"). Pairwise AMOD
//! clauses are then replaced where possible by region-vertex clauses
//! `¬r(S,t) ∨ ¬x(v,t)` (when `v` is within `t` of every member of `S`) and
//! region-region clauses `¬r(S,t) ∨ ¬r(S',t)`. Whatever is left uncovered,
//! including pairs inside one region, stays pairwise.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, Formula, InstanceDescriptor, Lit, Variant, VarMap, FIRST_REGIONAL_COLOR};
use crate::grid::{in_fundamental_octant, l1_distance, Diamond, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("center color {c} must lie in 1..={k}")]
    CenterColor { c: u32, k: u32 },
    #[error("symmetry layer color {0} is repeated")]
    DuplicateLayer(u32),
    #[error("symmetry layer color {color} is outside 1..={k}")]
    LayerColor { color: u32, k: u32 },
    #[error("symmetry layer color {color} needs radius {needed} but the diamond has radius {r}")]
    LayerTooWide { color: u32, needed: u32, r: u32 },
    #[error("chessboard fixing puts color 1 next to a center colored 1")]
    ChessboardConflict,
}

/// Role of a clause inside an encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseKind {
    Aloc,
    RegionDefinition,
    RegionMembership,
    RegionVertex,
    RegionRegion,
    Amod,
    Center,
    Alod,
    Symmetry,
    Chessboard,
}

/// A `+`-shaped region: `D1(center)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    pub center: Vertex,
    pub members: [Vertex; 5],
}

impl Region {
    pub fn new(id: usize, center: Vertex) -> Self {
        Region {
            id,
            center,
            members: center.plus_shape(),
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        l1_distance(self.center, v) <= 1
    }

    /// Δ(v, S): largest distance from `v` to a member.
    pub fn max_distance_to(&self, v: Vertex) -> u32 {
        self.members.iter().map(|&u| l1_distance(u, v)).max().unwrap_or(0)
    }

    /// Δ(S, S'): largest distance between members of the two regions.
    pub fn max_distance_between(&self, other: &Region) -> u32 {
        self.members
            .iter()
            .map(|&u| other.max_distance_to(u))
            .max()
            .unwrap_or(0)
    }

    /// d(u, S) for `u` the origin: smallest member norm.
    pub fn distance_to_origin(&self) -> u32 {
        self.members.iter().map(|m| m.norm()).min().unwrap_or(0)
    }
}

/// Region centers are the points of the lattice spanned by `(1, -2)` and
/// `(2, 1)` with norm at most `r - 1`, so every region fits in `D_r`. The
/// lattice tiles the plane with disjoint pluses. Ordered by `(norm, x, y)`.
pub fn place_regions(r: u32) -> Vec<Region> {
    if r == 0 {
        return Vec::new();
    }
    let mut centers: Vec<Vertex> = Diamond::new(r - 1)
        .vertices()
        .iter()
        .copied()
        .filter(|v| (v.x - 2 * v.y).rem_euclid(5) == 0)
        .collect();
    centers.sort_by_key(|v| (v.norm(), v.x, v.y));
    centers
        .into_iter()
        .enumerate()
        .map(|(id, c)| Region::new(id, c))
        .collect()
}

/// Number of unordered pairs of `D_r` at distance in `(0, t]`.
pub fn amod_count(r: u32, t: u32) -> u64 {
    // Count ordered offsets once per vertex, using the ring structure of the
    // ball: 4d points at distance d from any vertex, clipped to the diamond.
    let d = Diamond::new(r);
    let mut twice = 0u64;
    for &u in d.vertices() {
        let ri = r as i32;
        let ti = t as i32;
        for dx in -ti..=ti {
            let x = u.x + dx;
            let rest = ti - dx.abs();
            let span = ri - x.abs();
            if span < 0 {
                continue;
            }
            let lo = (u.y - rest).max(-span);
            let hi = (u.y + rest).min(span);
            if hi >= lo {
                twice += (hi - lo + 1) as u64;
            }
        }
        twice -= 1; // u itself
    }
    twice / 2
}

/// Which mechanism of the plus encoding forbids `x(u,t) ∧ x(v,t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// `¬r(region, t) ∨ ¬x(vertex, t)`.
    RegionVertex { region: usize, vertex: Vertex },
    /// `¬r(a, t) ∨ ¬r(b, t)`.
    RegionRegion { a: usize, b: usize },
    /// Both endpoints in one region; a pairwise clause is emitted.
    WithinRegion(usize),
    /// No regional mechanism applies; a pairwise clause is emitted.
    Residual,
}

/// Classifies a conflicting pair for color `t ≥ 4`. Callers guarantee
/// `0 < d(u, v) ≤ t`.
pub fn pair_coverage(u: Vertex, v: Vertex, t: u32, regions: &[Region]) -> Coverage {
    let find = |w: Vertex| regions.iter().find(|s| s.contains(w));
    pair_coverage_with(find(u), find(v), u, v, t)
}

fn pair_coverage_with(
    su: Option<&Region>,
    sv: Option<&Region>,
    u: Vertex,
    v: Vertex,
    t: u32,
) -> Coverage {
    if t < FIRST_REGIONAL_COLOR {
        return Coverage::Residual;
    }
    match (su, sv) {
        (Some(a), Some(b)) if a.id == b.id => Coverage::WithinRegion(a.id),
        (Some(a), Some(b)) => {
            if a.max_distance_between(b) <= t {
                let (a, b) = (a.id.min(b.id), a.id.max(b.id));
                Coverage::RegionRegion { a, b }
            } else if a.max_distance_to(v) <= t {
                Coverage::RegionVertex {
                    region: a.id,
                    vertex: v,
                }
            } else if b.max_distance_to(u) <= t {
                Coverage::RegionVertex {
                    region: b.id,
                    vertex: u,
                }
            } else {
                Coverage::Residual
            }
        }
        (Some(a), None) if a.max_distance_to(v) <= t => Coverage::RegionVertex {
            region: a.id,
            vertex: v,
        },
        (None, Some(b)) if b.max_distance_to(u) <= t => Coverage::RegionVertex {
            region: b.id,
            vertex: u,
        },
        _ => Coverage::Residual,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingOptions {
    pub variant: Variant,
    /// Add at-least-one-distance clauses on color 1.
    pub alod: bool,
    /// Colors that receive a symmetry-breaking layer, in layer order.
    pub symmetry_layers: Vec<u32>,
    /// Fix color 1 on every odd vertex.
    pub chessboard: bool,
    /// Emit `¬r(S,t) ∨ ⋁ x(v,t)` for each regional variable. Off by default:
    /// the membership clauses alone make the encoding equisatisfiable.
    pub region_definitions: bool,
}

impl Default for EncodingOptions {
    fn default() -> Self {
        EncodingOptions {
            variant: Variant::Direct,
            alod: false,
            symmetry_layers: Vec::new(),
            chessboard: false,
            region_definitions: false,
        }
    }
}

impl EncodingOptions {
    pub fn direct() -> Self {
        Self::default()
    }

    pub fn plus() -> Self {
        EncodingOptions {
            variant: Variant::Plus,
            ..Self::default()
        }
    }

    pub fn with_alod(mut self, on: bool) -> Self {
        self.alod = on;
        self
    }

    pub fn with_symmetry(mut self, layers: Vec<u32>) -> Self {
        self.symmetry_layers = layers;
        self
    }

    pub fn with_chessboard(mut self, on: bool) -> Self {
        self.chessboard = on;
        self
    }
}

/// Default layer colors: `k, k-1, …, k-5` (six layers), clipped at 1.
pub fn default_symmetry_layers(k: u32) -> Vec<u32> {
    (k.saturating_sub(5).max(1)..=k).rev().collect()
}

/// An encoded instance with the role of every clause.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub formula: Formula,
    pub map: VarMap,
    pub regions: Vec<Region>,
    pub kinds: Vec<ClauseKind>,
}

impl Encoding {
    fn push(&mut self, kind: ClauseKind, clause: Clause) {
        self.formula.push(clause);
        self.kinds.push(kind);
    }

    pub fn r(&self) -> u32 {
        self.map.diamond().radius()
    }

    pub fn k(&self) -> u32 {
        self.map.k()
    }

    fn descriptor_mut(&mut self) -> &mut InstanceDescriptor {
        self.formula.descriptor_mut().expect("encodings carry a descriptor")
    }

    /// Appends one ALOD clause per vertex; returns how many were added.
    pub fn add_alod(&mut self) -> usize {
        let clauses = alod_clauses(&self.map);
        let n = clauses.len();
        for c in clauses {
            self.push(ClauseKind::Alod, c);
        }
        self.descriptor_mut().alod = true;
        n
    }

    pub fn add_symmetry_layers(&mut self, layers: &[u32]) -> Result<usize, EncodeError> {
        let clauses = symmetry_clauses(&self.map, layers)?;
        let n = clauses.len();
        for c in clauses {
            self.push(ClauseKind::Symmetry, c);
        }
        self.descriptor_mut().symmetry_layers.extend_from_slice(layers);
        Ok(n)
    }

    pub fn apply_chessboard(&mut self) -> Result<usize, EncodeError> {
        let c = self.formula.descriptor().map(|d| d.c).unwrap_or(0);
        let clauses = chessboard_clauses(&self.map, c)?;
        let n = clauses.len();
        for cl in clauses {
            self.push(ClauseKind::Chessboard, cl);
        }
        self.descriptor_mut().chessboard = true;
        Ok(n)
    }

    /// Number of clauses of the given kind.
    pub fn count(&self, kind: ClauseKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }
}

fn check_center(k: u32, c: u32) -> Result<(), EncodeError> {
    if c == 0 || c > k {
        Err(EncodeError::CenterColor { c, k })
    } else {
        Ok(())
    }
}

fn descriptor(variant: Variant, r: u32, k: u32, c: u32, regions: &[Region], defs: bool) -> InstanceDescriptor {
    InstanceDescriptor {
        variant,
        r,
        k,
        c,
        alod: false,
        symmetry_layers: Vec::new(),
        chessboard: false,
        region_definitions: defs,
        region_centers: regions.iter().map(|s| s.center).collect(),
    }
}

/// Encodes `D(r, k, c)` with every option applied.
pub fn encode(r: u32, k: u32, c: u32, opts: &EncodingOptions) -> Result<Encoding, EncodeError> {
    check_center(k, c)?;
    for (i, &t) in opts.symmetry_layers.iter().enumerate() {
        if opts.symmetry_layers[..i].contains(&t) {
            return Err(EncodeError::DuplicateLayer(t));
        }
    }
    if opts.chessboard && c == 1 {
        return Err(EncodeError::ChessboardConflict);
    }
    let mut enc = match opts.variant {
        Variant::Direct => base_direct(r, k, c),
        Variant::Plus => base_plus(r, k, c, opts.region_definitions),
    };
    if opts.alod {
        enc.add_alod();
    }
    if !opts.symmetry_layers.is_empty() {
        enc.add_symmetry_layers(&opts.symmetry_layers)?;
    }
    if opts.chessboard {
        enc.apply_chessboard()?;
    }
    Ok(enc)
}

pub fn encode_direct(r: u32, k: u32, c: u32) -> Result<(Formula, VarMap), EncodeError> {
    let e = encode(r, k, c, &EncodingOptions::direct())?;
    Ok((e.formula, e.map))
}

/// The plus encoding; with `k < 4` there are no regional colors and the
/// result equals the direct encoding (tagged as plus).
pub fn encode_plus(r: u32, k: u32, c: u32) -> Result<(Formula, VarMap), EncodeError> {
    let e = encode(r, k, c, &EncodingOptions::plus())?;
    Ok((e.formula, e.map))
}

fn aloc(map: &VarMap, i: usize) -> Clause {
    (1..=map.k()).map(|t| map.x_at(i, t).pos()).collect()
}

/// Visits every pair `i < j` of diamond indices with `0 < d ≤ t`.
fn for_each_close_pair(d: &Diamond, t: u32, mut f: impl FnMut(usize, usize)) {
    let verts = d.vertices();
    for i in 0..verts.len() {
        let u = verts[i];
        for (j, &v) in verts.iter().enumerate().skip(i + 1) {
            if (v.x - u.x) as u32 > t {
                break;
            }
            if l1_distance(u, v) <= t {
                f(i, j);
            }
        }
    }
}

fn base_direct(r: u32, k: u32, c: u32) -> Encoding {
    let diamond = Diamond::new(r);
    let map = VarMap::new(diamond, k, 0);
    let mut enc = Encoding {
        formula: Formula::new(map.num_vars()),
        map,
        regions: Vec::new(),
        kinds: Vec::new(),
    };
    enc.formula.set_descriptor(descriptor(Variant::Direct, r, k, c, &[], false));
    let n = enc.map.diamond().len();
    for i in 0..n {
        let cl = aloc(&enc.map, i);
        enc.push(ClauseKind::Aloc, cl);
    }
    for t in 1..=k {
        let mut pairs = Vec::new();
        for_each_close_pair(enc.map.diamond(), t, |i, j| pairs.push((i, j)));
        for (i, j) in pairs {
            let cl = Clause::new(vec![enc.map.x_at(i, t).neg(), enc.map.x_at(j, t).neg()]);
            enc.push(ClauseKind::Amod, cl);
        }
    }
    let center = enc.map.x(Vertex::ORIGIN, c).pos();
    enc.push(ClauseKind::Center, Clause::unit(center));
    enc
}

fn base_plus(r: u32, k: u32, c: u32, defs: bool) -> Encoding {
    if k < FIRST_REGIONAL_COLOR {
        let mut e = base_direct(r, k, c);
        e.descriptor_mut().variant = Variant::Plus;
        return e;
    }
    let regions = place_regions(r);
    let diamond = Diamond::new(r);
    let map = VarMap::new(diamond, k, regions.len());
    let mut enc = Encoding {
        formula: Formula::new(map.num_vars()),
        map,
        regions,
        kinds: Vec::new(),
    };
    enc.formula
        .set_descriptor(descriptor(Variant::Plus, r, k, c, &enc.regions, defs));
    let verts: Vec<Vertex> = enc.map.diamond().vertices().to_vec();
    let n = verts.len();
    let region_of: Vec<Option<usize>> = verts
        .iter()
        .map(|&v| enc.regions.iter().position(|s| s.contains(v)))
        .collect();
    let regional = FIRST_REGIONAL_COLOR..=k;

    for i in 0..n {
        let cl = aloc(&enc.map, i);
        enc.push(ClauseKind::Aloc, cl);
    }
    if defs {
        for s in 0..enc.regions.len() {
            for t in regional.clone() {
                let mut lits = vec![enc.map.r(s, t).neg()];
                lits.extend(enc.regions[s].members.iter().map(|&m| enc.map.x(m, t).pos()));
                enc.push(ClauseKind::RegionDefinition, Clause::new(lits));
            }
        }
    }
    for s in 0..enc.regions.len() {
        for t in regional.clone() {
            let members = enc.regions[s].members;
            for m in members {
                let cl = Clause::new(vec![enc.map.r(s, t).pos(), enc.map.x(m, t).neg()]);
                enc.push(ClauseKind::RegionMembership, cl);
            }
        }
    }
    // Region pairs close enough for a region-region clause, per color.
    let nreg = enc.regions.len();
    let mut pair_dist = vec![vec![0u32; nreg]; nreg];
    for a in 0..nreg {
        for b in 0..nreg {
            pair_dist[a][b] = enc.regions[a].max_distance_between(&enc.regions[b]);
        }
    }
    for t in regional.clone() {
        for s in 0..nreg {
            for (vi, &v) in verts.iter().enumerate() {
                if enc.regions[s].contains(v) || enc.regions[s].max_distance_to(v) > t {
                    continue;
                }
                if let Some(o) = region_of[vi] {
                    if pair_dist[s][o] <= t {
                        continue;
                    }
                }
                let cl = Clause::new(vec![enc.map.r(s, t).neg(), enc.map.x_at(vi, t).neg()]);
                enc.push(ClauseKind::RegionVertex, cl);
            }
        }
    }
    for t in regional.clone() {
        for a in 0..nreg {
            for b in a + 1..nreg {
                if pair_dist[a][b] <= t {
                    let cl = Clause::new(vec![enc.map.r(a, t).neg(), enc.map.r(b, t).neg()]);
                    enc.push(ClauseKind::RegionRegion, cl);
                }
            }
        }
    }
    for t in 1..=k {
        let mut pairs = Vec::new();
        for_each_close_pair(enc.map.diamond(), t, |i, j| pairs.push((i, j)));
        for (i, j) in pairs {
            let keep = t < FIRST_REGIONAL_COLOR
                || matches!(
                    pair_coverage_with(
                        region_of[i].map(|s| &enc.regions[s]),
                        region_of[j].map(|s| &enc.regions[s]),
                        verts[i],
                        verts[j],
                        t,
                    ),
                    Coverage::Residual | Coverage::WithinRegion(_)
                );
            if keep {
                let cl = Clause::new(vec![enc.map.x_at(i, t).neg(), enc.map.x_at(j, t).neg()]);
                enc.push(ClauseKind::Amod, cl);
            }
        }
    }
    let center = enc.map.x(Vertex::ORIGIN, c).pos();
    enc.push(ClauseKind::Center, Clause::unit(center));
    enc
}

/// `C_v = ⋁ x(w, 1)` over `w ∈ D1(v) ∩ D_r`, one clause per vertex `v`.
pub fn alod_clauses(map: &VarMap) -> Vec<Clause> {
    let d = map.diamond();
    d.vertices()
        .iter()
        .map(|&v| {
            v.plus_shape()
                .into_iter()
                .filter(|&w| d.contains(w))
                .map(|w| map.x(w, 1).pos())
                .collect()
        })
        .collect()
}

/// Appends ALOD clauses to a formula built over `map`.
pub fn add_alod(f: &mut Formula, map: &VarMap) -> usize {
    let clauses = alod_clauses(map);
    let n = clauses.len();
    f.extend(clauses);
    n
}

/// Layered symmetry breaking. The first layer color `t` gets unit clauses
/// `¬x((i,j), t)` for `(i,j) ∈ D_{⌊t/2⌋}` outside the fundamental octant;
/// later layers get the same clauses widened by the octant literals of every
/// earlier layer color, so they only fire while symmetry is still unbroken.
pub fn symmetry_clauses(map: &VarMap, layers: &[u32]) -> Result<Vec<Clause>, EncodeError> {
    let r = map.diamond().radius();
    let k = map.k();
    for (i, &t) in layers.iter().enumerate() {
        if t == 0 || t > k {
            return Err(EncodeError::LayerColor { color: t, k });
        }
        if layers[..i].contains(&t) {
            return Err(EncodeError::DuplicateLayer(t));
        }
        if t / 2 > r {
            return Err(EncodeError::LayerTooWide {
                color: t,
                needed: t / 2,
                r,
            });
        }
    }
    let mut out = Vec::new();
    let mut broken: Vec<Lit> = Vec::new();
    for &t in layers {
        let half = Diamond::new(t / 2);
        for &v in half.vertices() {
            if in_fundamental_octant(v) {
                continue;
            }
            let mut lits = Vec::with_capacity(broken.len() + 1);
            lits.push(map.x(v, t).neg());
            lits.extend_from_slice(&broken);
            out.push(Clause::new(lits));
        }
        broken.extend(
            half.vertices()
                .iter()
                .filter(|&&v| in_fundamental_octant(v))
                .map(|&v| map.x(v, t).pos()),
        );
    }
    Ok(out)
}

pub fn add_symmetry_layers(f: &mut Formula, map: &VarMap, layers: &[u32]) -> Result<usize, EncodeError> {
    let clauses = symmetry_clauses(map, layers)?;
    let n = clauses.len();
    f.extend(clauses);
    Ok(n)
}

/// Units `x(v, 1)` for every vertex with odd coordinate sum. The center is
/// even, so a center colored 1 would clash with its neighbors.
pub fn chessboard_clauses(map: &VarMap, center_color: u32) -> Result<Vec<Clause>, EncodeError> {
    if center_color == 1 {
        return Err(EncodeError::ChessboardConflict);
    }
    Ok(map
        .diamond()
        .vertices()
        .iter()
        .filter(|v| (v.x + v.y).rem_euclid(2) == 1)
        .map(|&v| Clause::unit(map.x(v, 1).pos()))
        .collect())
}

pub fn apply_chessboard(f: &mut Formula, map: &VarMap, center_color: u32) -> Result<usize, EncodeError> {
    let clauses = chessboard_clauses(map, center_color)?;
    let n = clauses.len();
    f.extend(clauses);
    Ok(n)
}

/// Per-color clause counts of the parts that replace AMOD clauses: for a
/// regional color that is membership, region-vertex, region-region and the
/// remaining pairwise clauses; for colors 1..=3 the pairwise clauses only.
pub fn color_profile(enc: &Encoding) -> HashMap<u32, usize> {
    let mut out = HashMap::new();
    for (cl, kind) in enc.formula.clauses().iter().zip(&enc.kinds) {
        let counted = matches!(
            kind,
            ClauseKind::Amod
                | ClauseKind::RegionMembership
                | ClauseKind::RegionVertex
                | ClauseKind::RegionRegion
                | ClauseKind::RegionDefinition
        );
        if !counted {
            continue;
        }
        let color = cl
            .lits()
            .iter()
            .find_map(|l| {
                enc.map
                    .decode_vertex(l.var())
                    .map(|(_, t)| t)
                    .or_else(|| enc.map.decode_region(l.var()).map(|(_, t)| t))
            })
            .expect("clause mentions a known variable");
        *out.entry(color).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn direct_sizes() {
        let (f, m) = encode_direct(5, 10, 5).unwrap();
        assert_eq!((f.num_vars(), f.num_clauses()), (610, 10688));
        assert_eq!(m.num_vars(), 610);
        let (f, _) = encode_direct(6, 11, 6).unwrap();
        assert_eq!((f.num_vars(), f.num_clauses()), (935, 21086));
    }

    #[test]
    fn plus_sizes() {
        let (f, _) = encode_plus(5, 10, 5).unwrap();
        assert_eq!((f.num_vars(), f.num_clauses()), (673, 4063));
        let (f, _) = encode_plus(6, 11, 6).unwrap();
        assert_eq!((f.num_vars(), f.num_clauses()), (1039, 7548));
    }

    #[test]
    fn degenerate_instance() {
        let (f, _) = encode_direct(0, 1, 1).unwrap();
        assert_eq!((f.num_vars(), f.num_clauses()), (1, 2));
    }

    #[test]
    fn bad_center() {
        assert_eq!(
            encode_direct(3, 6, 7).unwrap_err(),
            EncodeError::CenterColor { c: 7, k: 6 }
        );
        assert!(encode_direct(3, 6, 0).is_err());
    }

    #[test]
    fn amod_spot_values() {
        assert_eq!(amod_count(4, 4), 454);
        assert_eq!(amod_count(14, 10), 30990);
        assert_eq!(amod_count(4, 10), 820);
        assert_eq!(amod_count(1, 1), 4);
    }

    #[test]
    fn region_placement() {
        let centers: Vec<(i32, i32)> = place_regions(6).iter().map(|s| (s.center.x, s.center.y)).collect();
        let expected_sets: [&[(i32, i32)]; 4] = [
            &[(0, 0)],
            &[(1, -2), (-1, 2), (2, 1), (-2, -1)],
            &[(3, -1), (-3, 1), (1, 3), (-1, -3)],
            &[(5, 0), (-5, 0), (0, 5), (0, -5)],
        ];
        assert_eq!(centers.len(), 13);
        let mut pos = 0;
        for group in expected_sets {
            let got: HashSet<_> = centers[pos..pos + group.len()].iter().copied().collect();
            let want: HashSet<_> = group.iter().copied().collect();
            assert_eq!(got, want);
            pos += group.len();
        }
        assert_eq!(place_regions(5).len(), 9);
        assert_eq!(place_regions(1).len(), 1);
        assert_eq!(place_regions(1)[0].center, Vertex::ORIGIN);
        assert!(place_regions(0).is_empty());
    }

    #[test]
    fn regions_are_disjoint_and_inside() {
        for r in 1..=10 {
            let regs = place_regions(r);
            let mut seen = HashSet::new();
            for s in &regs {
                for m in s.members {
                    assert!(m.norm() <= r);
                    assert!(seen.insert(m), "r={r}: {m} in two regions");
                }
            }
        }
    }

    #[test]
    fn alod_sizes() {
        let mut e = encode(6, 11, 6, &EncodingOptions::direct()).unwrap();
        assert_eq!(e.add_alod(), 85);
        assert_eq!(e.formula.num_clauses(), 21171);
        let e = encode(6, 11, 6, &EncodingOptions::plus().with_alod(true)).unwrap();
        assert_eq!(e.formula.num_clauses(), 7633);
        let m = VarMap::new(Diamond::new(3), 4, 0);
        let clause_at = |v: Vertex| {
            alod_clauses(&m)
                .into_iter()
                .zip(m.diamond().vertices())
                .find(|(_, w)| **w == v)
                .unwrap()
                .0
        };
        // corners lose three neighbors, other boundary vertices two
        assert_eq!(clause_at(Vertex::new(3, 0)).len(), 2);
        assert_eq!(clause_at(Vertex::new(1, 2)).len(), 3);
        assert_eq!(clause_at(Vertex::new(1, 1)).len(), 5);
    }

    #[test]
    fn symmetry_sizes() {
        let m = VarMap::new(Diamond::new(5), 10, 0);
        let single = symmetry_clauses(&m, &[10]).unwrap();
        assert_eq!(single.len(), 49);
        assert!(single.iter().all(|c| c.len() == 1 && !c.lits()[0].is_positive()));

        let opts = EncodingOptions::direct().with_symmetry(default_symmetry_layers(11));
        let e = encode(6, 11, 6, &opts).unwrap();
        assert_eq!(default_symmetry_layers(11), vec![11, 10, 9, 8, 7, 6]);
        assert_eq!(e.formula.num_clauses(), 21286);
        assert_eq!(e.formula.num_vars(), 935);
        // the five-layer variant 11..7
        let m6 = VarMap::new(Diamond::new(6), 11, 0);
        assert_eq!(symmetry_clauses(&m6, &[11, 10, 9, 8, 7]).unwrap().len(), 181);
    }

    #[test]
    fn later_layers_are_widened() {
        let m = VarMap::new(Diamond::new(5), 10, 0);
        let cls = symmetry_clauses(&m, &[10, 9]).unwrap();
        assert_eq!(cls.len(), 49 + 32);
        // second layer: one negative plus the 12 octant literals of color 10
        assert!(cls[49..].iter().all(|c| c.len() == 13));
    }

    #[test]
    fn symmetry_errors() {
        let m = VarMap::new(Diamond::new(3), 10, 0);
        assert!(matches!(
            symmetry_clauses(&m, &[10]),
            Err(EncodeError::LayerTooWide { .. })
        ));
        assert!(matches!(
            symmetry_clauses(&m, &[5, 5]),
            Err(EncodeError::DuplicateLayer(5))
        ));
        assert!(matches!(
            symmetry_clauses(&m, &[11]),
            Err(EncodeError::LayerColor { .. })
        ));
    }

    #[test]
    fn combined_sizes() {
        let layers = default_symmetry_layers(11);
        let d = encode(6, 11, 6, &EncodingOptions::direct().with_alod(true).with_symmetry(layers.clone())).unwrap();
        assert_eq!((d.formula.num_vars(), d.formula.num_clauses()), (935, 21371));
        let p = encode(6, 11, 6, &EncodingOptions::plus().with_symmetry(layers.clone())).unwrap();
        assert_eq!(p.formula.num_clauses(), 7748);
        let p = encode(6, 11, 6, &EncodingOptions::plus().with_alod(true).with_symmetry(layers)).unwrap();
        assert_eq!((p.formula.num_vars(), p.formula.num_clauses()), (1039, 7833));
    }

    #[test]
    fn chessboard_units() {
        let m = VarMap::new(Diamond::new(3), 7, 0);
        assert_eq!(chessboard_clauses(&m, 3).unwrap().len(), 16);
        let m1 = VarMap::new(Diamond::new(1), 3, 0);
        assert_eq!(chessboard_clauses(&m1, 3).unwrap().len(), 4);
        assert_eq!(chessboard_clauses(&m1, 1), Err(EncodeError::ChessboardConflict));
        assert!(encode(3, 7, 1, &EncodingOptions::direct().with_chessboard(true)).is_err());
    }

    #[test]
    fn coverage_classes() {
        let regs = place_regions(6);
        // both in the center region
        assert_eq!(
            pair_coverage(Vertex::ORIGIN, Vertex::new(1, 0), 4, &regs),
            Coverage::WithinRegion(0)
        );
        // center-region member against a vertex within reach of all members
        assert_eq!(
            pair_coverage(Vertex::ORIGIN, Vertex::new(0, 3), 4, &regs),
            Coverage::RegionVertex {
                region: 0,
                vertex: Vertex::new(0, 3)
            }
        );
        // (4,-2) and (4,2) lie outside every region
        assert!(regs.iter().all(|s| !s.contains(Vertex::new(4, -2)) && !s.contains(Vertex::new(4, 2))));
        assert_eq!(
            pair_coverage(Vertex::new(4, -2), Vertex::new(4, 2), 4, &regs),
            Coverage::Residual
        );
        // two neighboring regions under a large color
        assert!(matches!(
            pair_coverage(Vertex::ORIGIN, Vertex::new(2, 1), 10, &regs),
            Coverage::RegionRegion { a: 0, .. }
        ));
    }

    #[test]
    fn no_duplicate_or_tautological_clauses() {
        for r in 0..=4 {
            for variant in [EncodingOptions::direct(), EncodingOptions::plus()] {
                let k = 7;
                let opts = variant.with_alod(true).with_symmetry(vec![7, 6]);
                let Ok(e) = encode(r, k, 2.min(k), &opts) else {
                    continue;
                };
                let mut seen = HashSet::new();
                for c in e.formula.clauses() {
                    assert!(!c.is_tautology() && !c.has_duplicates());
                    assert!(seen.insert(c.normalized()), "r={r} duplicate {c}");
                }
            }
        }
    }

    #[test]
    fn plus_with_definitions() {
        let mut opts = EncodingOptions::plus();
        opts.region_definitions = true;
        let e = encode(5, 10, 5, &opts).unwrap();
        assert_eq!(e.count(ClauseKind::RegionDefinition), 63);
        assert_eq!(e.formula.num_clauses(), 4063 + 63);
    }

    #[test]
    fn small_k_plus_falls_back() {
        let (p, _) = encode_plus(3, 3, 2).unwrap();
        let (d, _) = encode_direct(3, 3, 2).unwrap();
        assert_eq!(p.clauses(), d.clauses());
    }
}
