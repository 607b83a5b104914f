//! Checks shared by the property tests and the acceptance run. Each returns
//! a short summary on success and the first counterexample on failure.
#![allow(dead_code)]

use packsat::cnf::{Formula, Lit, Var};
use packsat::encoder::{encode, ClauseKind, Encoding, EncodingOptions};
use packsat::engine::{extract_centered_coloring, first_falsified, solve, SolveOptions, SolveStatus};
use packsat::grid::{l1_distance, verify_coloring, Coloring, Diamond, Vertex, DIHEDRAL};
use packsat::proof::Checker;
use packsat::splitter::{tautology_brute_force, tautology_by_negation, Cube, CubeLayout};

pub type Check = Result<String, String>;

pub fn status(f: &Formula) -> SolveStatus {
    solve(f, &[], &SolveOptions::default()).unwrap().status
}

/// Assignment of an encoding's variables that realizes `col`.
pub fn assignment(enc: &Encoding, col: &Coloring) -> Vec<bool> {
    let mut a = vec![false; enc.formula.num_vars() as usize];
    for (v, t) in col.iter() {
        a[enc.map.x(v, t).index()] = true;
    }
    for reg in &enc.regions {
        for &m in &reg.members {
            let t = col.color(m).unwrap();
            if t >= 4 && t <= enc.map.k() {
                a[enc.map.r(reg.id, t).index()] = true;
            }
        }
    }
    a
}

/// Independent backtracking search for a packing coloring of `D_r` with
/// colors `1..=k` and the center colored `c`.
pub fn brute_force_colorable(r: u32, k: u32, c: u32) -> bool {
    let d = Diamond::new(r);
    let mut order: Vec<Vertex> = d.vertices().to_vec();
    order.sort_by_key(|v| (v.norm(), *v));
    let mut colors = vec![0u32; order.len()];
    colors[0] = c;
    fn go(i: usize, order: &[Vertex], colors: &mut [u32], k: u32) -> bool {
        if i == order.len() {
            return true;
        }
        for t in 1..=k {
            let clash = (0..i).any(|j| colors[j] == t && l1_distance(order[i], order[j]) <= t);
            if !clash {
                colors[i] = t;
                if go(i + 1, order, colors, k) {
                    return true;
                }
            }
        }
        colors[i] = 0;
        false
    }
    go(1, &order, &mut colors, k)
}

/// Pairs of `D_r` at distance in `(0, t]`, by enumeration.
pub fn close_pairs(r: u32, t: u32) -> u64 {
    let d = Diamond::new(r);
    let vs = d.vertices();
    let mut n = 0;
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            if l1_distance(u, v) <= t {
                n += 1;
            }
        }
    }
    n
}

/// Every ALOD clause is blocked on its first literal: each resolvent with a
/// clause containing the complement is a tautology.
pub fn alod_blocked(max_r: u32) -> Check {
    let mut checked = 0;
    for r in 0..=max_r {
        let k = r + 4;
        for c in [1, 2, k] {
            for base in [EncodingOptions::direct(), EncodingOptions::plus()] {
                let enc = encode(r, k, c, &base.with_alod(true)).unwrap();
                let clauses = enc.formula.clauses();
                for (i, kind) in enc.kinds.iter().enumerate() {
                    if *kind != ClauseKind::Alod {
                        continue;
                    }
                    let alod = clauses[i].lits();
                    let pivot = alod[0];
                    for other in clauses.iter().filter(|d| d.contains(!pivot)) {
                        let tautological = other.lits().iter().any(|&l| l != !pivot && alod.contains(&!l));
                        if !tautological {
                            return Err(format!("D({r},{k},{c}): {alod:?} not blocked by {:?}", other.lits()));
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} ALOD clauses blocked (r <= {max_r})"))
}

/// In the plus encoding, `x(u,t) ∧ x(v,t)` for any conflicting pair is
/// refuted by unit propagation.
pub fn plus_pairs_refuted(max_r: u32) -> Check {
    let mut checked = 0;
    for r in 0..=max_r {
        let k = (2 * r + 1).max(4);
        let enc = encode(r, k, k, &EncodingOptions::plus()).unwrap();
        let mut checker = Checker::new(&enc.formula);
        let d = enc.map.diamond();
        for t in 1..=k {
            for (i, &u) in d.vertices().iter().enumerate() {
                for &v in &d.vertices()[i + 1..] {
                    if l1_distance(u, v) > t {
                        continue;
                    }
                    let clause = [enc.map.x(u, t).neg(), enc.map.x(v, t).neg()];
                    if !checker.is_rup(&clause) {
                        return Err(format!("D({r},{k},{k}) color {t}: {u} and {v} both allowed"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} conflicting pairs refuted (r <= {max_r})"))
}

/// The image of a model's coloring under each dihedral symmetry is again a
/// model of the (unbroken) encoding.
pub fn dihedral_invariance(max_r: u32) -> Check {
    let mut images = 0;
    for r in 0..=max_r {
        for (k, c) in [(7, 3), (6, 6), (8, 1)] {
            for opts in [EncodingOptions::direct(), EncodingOptions::plus()] {
                let enc = encode(r, k, c, &opts).unwrap();
                let res = solve(&enc.formula, &[], &SolveOptions::default()).unwrap();
                let Some(model) = res.model else {
                    continue;
                };
                let col = extract_centered_coloring(&model, &enc.map, c).unwrap();
                for g in DIHEDRAL {
                    let image = col.transformed(g);
                    let a = assignment(&enc, &image);
                    if !verify_coloring(&image).is_valid()
                        || image.color(Vertex::ORIGIN) != Some(c)
                        || first_falsified(&enc.formula, &a).is_some()
                    {
                        return Err(format!("D({r},{k},{c}): a symmetric image is not a model"));
                    }
                    images += 1;
                }
            }
        }
    }
    Ok(format!("{images} model images verified (r <= {max_r})"))
}

/// Direct and plus encodings have the same verdict.
pub fn direct_plus_agree(max_r: u32, max_k: u32) -> Check {
    let mut n = 0;
    for r in 0..=max_r {
        for k in 1..=max_k {
            for c in 1..=k {
                let d = status(&encode(r, k, c, &EncodingOptions::direct()).unwrap().formula);
                let p = status(&encode(r, k, c, &EncodingOptions::plus()).unwrap().formula);
                if d != p {
                    return Err(format!("D({r},{k},{c}): direct {d:?}, plus {p:?}"));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} instances agree (r <= {max_r}, k <= {max_k})"))
}

/// Solves every instance up to the bounds and verifies each SAT model.
pub fn models_verify(max_r: u32, max_k: u32) -> Check {
    let mut sat = 0;
    for r in 0..=max_r {
        for k in 1..=max_k {
            for c in 1..=k {
                for opts in [EncodingOptions::direct(), EncodingOptions::plus().with_alod(true)] {
                    let enc = encode(r, k, c, &opts).unwrap();
                    let res = solve(&enc.formula, &[], &SolveOptions::default()).unwrap();
                    let Some(model) = res.model else { continue };
                    let col = extract_centered_coloring(&model, &enc.map, c).map_err(|e| e.to_string())?;
                    if !verify_coloring(&col).is_valid() || col.color(Vertex::ORIGIN) != Some(c) {
                        return Err(format!("D({r},{k},{c}): extracted coloring is invalid"));
                    }
                    sat += 1;
                }
            }
        }
    }
    Ok(format!("{sat} SAT models verified (r <= {max_r}, k <= {max_k})"))
}

/// The cubes cover every assignment, and every cube owns an assignment no
/// other cube covers, so dropping any one of them leaves a gap.
pub fn tautology_and_mutation(layout: &CubeLayout) -> Check {
    let cubes: Vec<Cube> = layout.cubes().collect();
    let vars: Vec<Var> = layout.variables();
    if vars.len() > 24 {
        return Err(format!("{} variables is too many to enumerate", vars.len()));
    }
    let bit = |l: Lit| vars.iter().position(|&v| v == l.var()).unwrap();
    let masks: Vec<(u32, u32)> = cubes
        .iter()
        .map(|c| {
            let care = c.lits.iter().fold(0, |m, &l| m | 1 << bit(l));
            let want = c.lits.iter().filter(|l| l.is_positive()).fold(0, |m, &l| m | 1 << bit(l));
            (care, want)
        })
        .collect();
    let mut owned = vec![false; cubes.len()];
    for a in 0u32..1 << vars.len() {
        let mut hit = None;
        let mut hits = 0;
        for (i, &(care, want)) in masks.iter().enumerate() {
            if a & care == want {
                hits += 1;
                hit = Some(i);
                if hits > 1 {
                    break;
                }
            }
        }
        match hits {
            0 => return Err(format!("assignment {a:#b} falsifies every cube")),
            1 => owned[hit.unwrap()] = true,
            _ => {}
        }
    }
    if let Some(i) = owned.iter().position(|&o| !o) {
        return Err(format!("dropping cube {i} keeps the tautology"));
    }
    if tautology_brute_force(&cubes) != Some(true) || !tautology_by_negation(&cubes) {
        return Err("library tautology checks disagree".into());
    }
    // spot-check the library on mutated sets too
    for i in [0, cubes.len() / 2, cubes.len() - 1] {
        if cubes.len() < 2 {
            break;
        }
        let mut fewer = cubes.clone();
        fewer.remove(i);
        if tautology_brute_force(&fewer) != Some(false) || tautology_by_negation(&fewer) {
            return Err(format!("removing cube {i} not detected"));
        }
    }
    Ok(format!("{} cubes", cubes.len()))
}
