//! Solving layer on top of [`crate::solver`]: verified single solves, cube
//! runs across worker threads, coloring extraction and an adapter for
//! external DIMACS solvers.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Formula, Lit, VarMap};
use crate::grid::{Coloring, GridError, Vertex};
use crate::solver::{ProofStep, RestartPolicy, Solver, SolverConfig, Status};
use crate::splitter::Cube;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("model violates clause {index}: {clause}")]
    ModelCheck { index: usize, clause: String },
    #[error("vertex {0:?} has no color in the model")]
    Uncolored(crate::grid::Vertex),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("external solver: {msg}\n{output}")]
    External { msg: String, output: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("journal: {0}")]
    Journal(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
}

impl From<Status> for SolveStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Sat => SolveStatus::Sat,
            Status::Unsat => SolveStatus::Unsat,
            Status::Unknown => SolveStatus::Unknown,
        }
    }
}

impl SolveStatus {
    /// Conventional solver exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            SolveStatus::Sat => 10,
            SolveStatus::Unsat => 20,
            SolveStatus::Unknown => 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Indexed by zero-based variable; present iff SAT.
    pub model: Option<Vec<bool>>,
    pub stats: SolveStats,
    /// DRAT steps, when proof logging was requested and the run was UNSAT.
    pub proof: Option<Vec<ProofStep>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub time: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    pub budget: Budget,
    pub proof: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            budget: Budget::default(),
            proof: false,
        }
    }
}

impl SolveOptions {
    pub fn with_proof(mut self) -> Self {
        self.proof = true;
        self
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            proof: self.proof,
            conflict_limit: self.budget.conflicts,
            time_limit: self.budget.time,
            initial_phase: false,
            restarts: RestartPolicy::Glucose,
        }
    }
}

/// Index of the first clause the model falsifies.
pub fn first_falsified(f: &Formula, model: &[bool]) -> Option<usize> {
    f.clauses().iter().position(|c| {
        !c.lits().iter().any(|l| {
            model
                .get(l.var().index())
                .is_some_and(|&val| val == l.is_positive())
        })
    })
}

fn check_model(f: &Formula, model: &[bool]) -> Result<(), EngineError> {
    match first_falsified(f, model) {
        None => Ok(()),
        Some(index) => Err(EngineError::ModelCheck {
            index,
            clause: f.clauses()[index].to_string(),
        }),
    }
}

fn check_assumptions(f: &Formula, assumptions: &[Lit]) -> Result<(), EngineError> {
    match assumptions.iter().find(|l| l.var().get() > f.num_vars()) {
        Some(l) => Err(EngineError::Argument(format!(
            "assumption {l} exceeds the {} variables of the formula",
            f.num_vars()
        ))),
        None => Ok(()),
    }
}

/// Solves `f` under `assumptions`. SAT models are checked against every
/// clause of `f` before they are returned. With proof logging, an UNSAT
/// result under assumptions carries a segment ending in the negated
/// assumptions, followed by deletions of the lemmas that are left over.
pub fn solve(f: &Formula, assumptions: &[Lit], opts: &SolveOptions) -> Result<SolveResult, EngineError> {
    check_assumptions(f, assumptions)?;
    if !f.check_vars() {
        return Err(EngineError::Argument("clause mentions an undeclared variable".into()));
    }
    let start = Instant::now();
    let mut solver = Solver::from_formula(f, opts.solver_config());
    let status = solver.solve(assumptions);
    let st = solver.stats();
    let stats = SolveStats {
        conflicts: st.conflicts,
        decisions: st.decisions,
        propagations: st.propagations,
        wall: start.elapsed(),
    };
    let mut result = SolveResult {
        status: status.into(),
        model: None,
        stats,
        proof: None,
    };
    match status {
        Status::Sat => {
            let model = solver.model().to_vec();
            check_model(f, &model)?;
            result.model = Some(model);
        }
        Status::Unsat if opts.proof => {
            let empty_derived = solver.final_clause().is_empty();
            solver.log_learned_cleanup();
            let mut steps = solver.take_proof();
            if !empty_derived {
                // the cleanup must not remove what the final clause needs
                let cleanup = steps.iter().rposition(|s| matches!(s, ProofStep::Add(_))).map_or(0, |i| i + 1);
                let tail = steps.split_off(cleanup);
                steps.push(ProofStep::Add(assumptions.iter().map(|&l| !l).collect()));
                steps.extend(tail);
            }
            result.proof = Some(steps);
        }
        _ => {}
    }
    Ok(result)
}

/// Colors each vertex by its lowest true color variable.
pub fn extract_coloring(model: &[bool], map: &VarMap) -> Result<Coloring, EngineError> {
    extract(model, map, None)
}

/// Like [`extract_coloring`], but the center keeps `center` when that
/// variable is true. Models may set several colors on one vertex (ALOD can
/// add color 1 next to the center color); any one of them gives a packing
/// coloring, and this choice gives one of the instance itself.
pub fn extract_centered_coloring(model: &[bool], map: &VarMap, center: u32) -> Result<Coloring, EngineError> {
    extract(model, map, Some(center))
}

fn extract(model: &[bool], map: &VarMap, center: Option<u32>) -> Result<Coloring, EngineError> {
    let d = map.diamond();
    let is_true = |i: usize, t: u32| model.get(map.x_at(i, t).index()).copied().unwrap_or(false);
    let colors = d
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if let Some(c) = center.filter(|&c| v == Vertex::ORIGIN && c <= map.k() && is_true(i, c)) {
                return Ok(c);
            }
            (1..=map.k()).find(|&t| is_true(i, t)).ok_or(EngineError::Uncolored(v))
        })
        .collect::<Result<Vec<u32>, _>>()?;
    Ok(Coloring::from_colors(d.radius(), colors)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubeStatus {
    Sat,
    Unsat,
    Unknown,
    /// Not attempted because the run stopped at a satisfiable cube.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeRow {
    pub index: u64,
    pub status: CubeStatus,
    pub seconds: f64,
    pub conflicts: u64,
    pub proof: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CubeRunReport {
    pub rows: Vec<CubeRow>,
}

impl CubeRunReport {
    pub fn all_unsat(&self) -> bool {
        self.rows.iter().all(|r| r.status == CubeStatus::Unsat)
    }

    /// First cube with a satisfying assignment, if any.
    pub fn satisfiable_cube(&self) -> Option<u64> {
        self.rows.iter().find(|r| r.status == CubeStatus::Sat).map(|r| r.index)
    }

    pub fn max_seconds(&self) -> f64 {
        self.rows.iter().map(|r| r.seconds).fold(0.0, f64::max)
    }

    pub fn avg_seconds(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.rows.iter().map(|r| r.seconds).sum::<f64>() / self.rows.len() as f64
        }
    }

    pub fn total_conflicts(&self) -> u64 {
        self.rows.iter().map(|r| r.conflicts).sum()
    }

    pub fn status(&self) -> SolveStatus {
        if self.satisfiable_cube().is_some() {
            SolveStatus::Sat
        } else if self.all_unsat() {
            SolveStatus::Unsat
        } else {
            SolveStatus::Unknown
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,status,seconds,conflicts,proof\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:?},{:.6},{},{}\n",
                r.index,
                r.status,
                r.seconds,
                r.conflicts,
                r.proof.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct CubeRunOptions {
    pub workers: usize,
    pub solve: SolveOptions,
    /// Per-cube DRAT files go here, named by zero-padded cube index.
    pub proof_dir: Option<PathBuf>,
    /// Line-delimited JSON of finished cubes; finished cubes are skipped on
    /// a rerun.
    pub journal: Option<PathBuf>,
    pub stop_on_sat: bool,
}

pub struct CubeRun {
    pub report: CubeRunReport,
    /// Per-cube proof segments in cube order (when proofs are on and kept
    /// in memory, i.e. no `proof_dir`).
    pub segments: Vec<Vec<ProofStep>>,
    /// A verified model of the first satisfiable cube.
    pub model: Option<Vec<bool>>,
}

pub fn proof_file_name(index: u64) -> String {
    format!("cube-{index:09}.drat")
}

fn read_journal(path: &Path) -> Result<Vec<CubeRow>, EngineError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for line in BufReader::new(fs::File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // an interrupted write leaves a truncated last line behind
        match serde_json::from_str::<CubeRow>(&line) {
            Ok(row) => rows.push(row),
            Err(_) => break,
        }
    }
    Ok(rows)
}

/// Solves every cube under assumptions with `workers` threads, each using a
/// fresh solver per cube. Rows come back in cube order.
pub fn solve_cubes(f: &Formula, cubes: &[Cube], opts: &CubeRunOptions) -> Result<CubeRun, EngineError> {
    for c in cubes {
        check_assumptions(f, &c.lits)?;
    }
    let mut done: Vec<Option<CubeRow>> = vec![None; cubes.len()];
    if let Some(j) = &opts.journal {
        for row in read_journal(j)? {
            if let Some(i) = cubes.iter().position(|c| c.index == row.index) {
                // proofs held in memory are not journaled, so redo those
                if !(opts.solve.proof && opts.proof_dir.is_none() && row.status == CubeStatus::Unsat) {
                    done[i] = Some(row);
                }
            }
        }
    }
    if let Some(dir) = &opts.proof_dir {
        fs::create_dir_all(dir)?;
    }
    let journal = match &opts.journal {
        Some(p) => Some(Mutex::new(
            fs::OpenOptions::new().create(true).append(true).open(p)?,
        )),
        None => None,
    };
    let pending: Vec<usize> = (0..cubes.len()).filter(|&i| done[i].is_none()).collect();
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let workers = opts.workers.max(1).min(pending.len().max(1));
    let (tx, rx) = mpsc::channel::<Result<(usize, CubeRow, Option<Vec<ProofStep>>, Option<Vec<bool>>), EngineError>>();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, stop, pending, journal) = (&next, &stop, &pending, &journal);
            scope.spawn(move || loop {
                let slot = next.fetch_add(1, Ordering::SeqCst);
                let Some(&i) = pending.get(slot) else { break };
                let cube = &cubes[i];
                if stop.load(Ordering::SeqCst) {
                    let row = CubeRow {
                        index: cube.index,
                        status: CubeStatus::Skipped,
                        seconds: 0.0,
                        conflicts: 0,
                        proof: None,
                    };
                    let _ = tx.send(Ok((i, row, None, None)));
                    continue;
                }
                let outcome = run_one(f, cube, opts, journal.as_ref());
                if let Ok((row, _, _)) = &outcome {
                    if row.status == CubeStatus::Sat && opts.stop_on_sat {
                        stop.store(true, Ordering::SeqCst);
                    }
                }
                let failed = outcome.is_err();
                let _ = tx.send(outcome.map(|(row, proof, model)| (i, row, proof, model)));
                if failed {
                    stop.store(true, Ordering::SeqCst);
                    break;
                }
            });
        }
    });
    drop(tx);

    let mut segments: Vec<Option<Vec<ProofStep>>> = vec![None; cubes.len()];
    let mut model = None;
    let mut first_sat = usize::MAX;
    let mut error = None;
    for msg in rx {
        match msg {
            Ok((i, row, proof, m)) => {
                if let Some(m) = m {
                    if i < first_sat {
                        first_sat = i;
                        model = Some(m);
                    }
                }
                segments[i] = proof;
                done[i] = Some(row);
            }
            Err(e) => error = error.or(Some(e)),
        }
    }
    if let Some(e) = error {
        return Err(e);
    }
    let rows: Vec<CubeRow> = done
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.unwrap_or(CubeRow {
                index: cubes[i].index,
                status: CubeStatus::Skipped,
                seconds: 0.0,
                conflicts: 0,
                proof: None,
            })
        })
        .collect();
    let keep = opts.solve.proof && opts.proof_dir.is_none();
    Ok(CubeRun {
        report: CubeRunReport { rows },
        segments: if keep {
            segments.into_iter().map(Option::unwrap_or_default).collect()
        } else {
            Vec::new()
        },
        model,
    })
}

type OneCube = (CubeRow, Option<Vec<ProofStep>>, Option<Vec<bool>>);

fn run_one(
    f: &Formula,
    cube: &Cube,
    opts: &CubeRunOptions,
    journal: Option<&Mutex<fs::File>>,
) -> Result<OneCube, EngineError> {
    let res = solve(f, &cube.lits, &opts.solve)?;
    let status = match res.status {
        SolveStatus::Sat => CubeStatus::Sat,
        SolveStatus::Unsat => CubeStatus::Unsat,
        SolveStatus::Unknown => CubeStatus::Unknown,
    };
    let mut proof = res.proof;
    let mut proof_path = None;
    if let (Some(dir), Some(steps)) = (&opts.proof_dir, &proof) {
        let path = dir.join(proof_file_name(cube.index));
        let mut out = io::BufWriter::new(fs::File::create(&path)?);
        crate::proof::write_drat(&mut out, steps)?;
        out.flush()?;
        proof_path = Some(path);
        proof = None;
    }
    let row = CubeRow {
        index: cube.index,
        status,
        seconds: res.stats.wall.as_secs_f64(),
        conflicts: res.stats.conflicts,
        proof: proof_path,
    };
    if let Some(j) = journal {
        let line = serde_json::to_string(&row)?;
        let mut file = j.lock().unwrap_or_else(|e| e.into_inner());
        writeln!(file, "{line}")?;
        file.flush()?;
    }
    Ok((row, proof, res.model))
}

/// Placeholder replaced by the formula path in external command templates.
pub const PATH_PLACEHOLDER: &str = "{}";

/// Writes `f` to `workdir`, runs the templated command and parses its
/// `s`/`v` output. Exit codes 10 and 20 are expected; 0 is tolerated when a
/// status line is present.
pub fn run_external(f: &Formula, template: &str, workdir: &Path) -> Result<SolveResult, EngineError> {
    if !template.contains(PATH_PLACEHOLDER) {
        return Err(EngineError::Argument(format!(
            "command template {template:?} lacks the {PATH_PLACEHOLDER} placeholder"
        )));
    }
    let mut parts = template.split_whitespace();
    let Some(program) = parts.next() else {
        return Err(EngineError::Argument("empty command template".into()));
    };
    fs::create_dir_all(workdir)?;
    let path = workdir.join("formula.cnf");
    fs::write(&path, f.to_dimacs())?;
    let path_str = path.to_string_lossy();
    let args: Vec<String> = parts.map(|a| a.replace(PATH_PLACEHOLDER, &path_str)).collect();
    let program = program.replace(PATH_PLACEHOLDER, &path_str);

    let start = Instant::now();
    let out = Command::new(&program).args(&args).current_dir(workdir).output()?;
    let wall = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let captured = || format!("{stdout}{}", String::from_utf8_lossy(&out.stderr));
    let fail = |msg: String| EngineError::External {
        msg,
        output: captured(),
    };

    let mut status = None;
    let mut values: Vec<i32> = Vec::new();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SolveStatus::Sat,
                "UNSATISFIABLE" => SolveStatus::Unsat,
                "UNKNOWN" => SolveStatus::Unknown,
                other => return Err(fail(format!("unknown status {other:?}"))),
            });
        } else if let Some(rest) = line.strip_prefix("v ").or(if line == "v" { Some("") } else { None }) {
            for tok in rest.split_whitespace() {
                values.push(tok.parse().map_err(|_| fail(format!("bad value {tok:?}")))?);
            }
        }
    }
    let Some(status) = status else {
        return Err(fail("no status line".into()));
    };
    match (out.status.code(), status) {
        (Some(10), SolveStatus::Sat) | (Some(20), SolveStatus::Unsat) | (Some(0), _) => {}
        (code, _) => return Err(fail(format!("unexpected exit status {code:?} for {status:?}"))),
    }
    let mut result = SolveResult {
        status,
        model: None,
        stats: SolveStats {
            wall,
            ..SolveStats::default()
        },
        proof: None,
    };
    if status == SolveStatus::Sat {
        let mut model = vec![false; f.num_vars() as usize];
        for v in values.into_iter().take_while(|&v| v != 0) {
            let idx = v.unsigned_abs() as usize - 1;
            if idx >= model.len() {
                return Err(fail(format!("value {v} out of range")));
            }
            model[idx] = v > 0;
        }
        check_model(f, &model).map_err(|e| fail(e.to_string()))?;
        result.model = Some(model);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;
    use crate::encoder::{encode, EncodingOptions};
    use crate::grid::verify_coloring;

    fn lit(x: i32) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = solve(&Formula::new(0), &[], &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
        assert_eq!(r.model, Some(vec![]));
    }

    #[test]
    fn fig2_verdicts() {
        let unsat = encode(3, 6, 3, &EncodingOptions::direct()).unwrap();
        let r = solve(&unsat.formula, &[], &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Unsat);

        let sat = encode(3, 7, 3, &EncodingOptions::direct()).unwrap();
        let r = solve(&sat.formula, &[], &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
        let col = extract_coloring(r.model.as_ref().unwrap(), &sat.map).unwrap();
        assert!(verify_coloring(&col).is_valid());
        assert_eq!(col.color(crate::grid::Vertex::ORIGIN), Some(3));
    }

    #[test]
    fn lowest_color_wins() {
        // D(2,5,2) itself is unsatisfiable, so use six colors
        let enc = encode(2, 6, 2, &EncodingOptions::direct()).unwrap();
        let mut f = enc.formula.clone();
        // the center keeps its color 2 and also gets 1; no other vertex of
        // D(2,6,2) admits a second color
        let v = crate::grid::Vertex::ORIGIN;
        f.push(Clause::unit(enc.map.x(v, 1).pos()));
        let r = solve(&f, &[], &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
        let col = extract_coloring(r.model.as_ref().unwrap(), &enc.map).unwrap();
        assert_eq!(col.color(v), Some(1));
        assert!(verify_coloring(&col).is_valid());
        let col = extract_centered_coloring(r.model.as_ref().unwrap(), &enc.map, 2).unwrap();
        assert_eq!(col.color(v), Some(2));
        assert!(verify_coloring(&col).is_valid());
    }

    #[test]
    fn alod_on_a_single_vertex_keeps_the_center_color() {
        let enc = encode(0, 2, 2, &EncodingOptions::direct().with_alod(true)).unwrap();
        let r = solve(&enc.formula, &[], &SolveOptions::default()).unwrap();
        let model = r.model.unwrap();
        let v = crate::grid::Vertex::ORIGIN;
        assert_eq!(extract_coloring(&model, &enc.map).unwrap().color(v), Some(1));
        assert_eq!(extract_centered_coloring(&model, &enc.map, 2).unwrap().color(v), Some(2));
    }

    #[test]
    fn uncolored_vertex_is_an_error() {
        let enc = encode(1, 2, 1, &EncodingOptions::direct()).unwrap();
        let model = vec![false; enc.map.num_vars() as usize];
        assert!(matches!(extract_coloring(&model, &enc.map), Err(EngineError::Uncolored(_))));
    }

    #[test]
    fn bad_assumption_is_rejected() {
        let f = Formula::with_clauses(1, vec![Clause::unit(lit(1))]);
        assert!(matches!(
            solve(&f, &[lit(2)], &SolveOptions::default()),
            Err(EngineError::Argument(_))
        ));
    }

    #[test]
    fn unsat_under_assumptions_ends_with_negated_cube() {
        let f = Formula::with_clauses(
            3,
            vec![Clause::new(vec![lit(-1), lit(2)]), Clause::new(vec![lit(-2), lit(-3)])],
        );
        let r = solve(&f, &[lit(1), lit(3)], &SolveOptions::default().with_proof()).unwrap();
        assert_eq!(r.status, SolveStatus::Unsat);
        let proof = r.proof.unwrap();
        assert!(proof.contains(&ProofStep::Add(vec![lit(-1), lit(-3)])));
        assert!(proof.iter().all(|s| match s {
            ProofStep::Delete(c) => !f.clauses().iter().any(|o| o.lits() == &c[..]),
            _ => true,
        }));
    }

    #[test]
    fn cube_rows_follow_cube_order() {
        let enc = encode(3, 7, 3, &EncodingOptions::plus()).unwrap();
        let cubes: Vec<Cube> = (0..6)
            .map(|i| Cube {
                index: i,
                lits: if i % 2 == 0 { vec![] } else { vec![enc.map.x(crate::grid::Vertex::ORIGIN, 3).neg()] },
            })
            .collect();
        let opts = CubeRunOptions {
            workers: 3,
            ..CubeRunOptions::default()
        };
        let run = solve_cubes(&enc.formula, &cubes, &opts).unwrap();
        let idx: Vec<u64> = run.report.rows.iter().map(|r| r.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4, 5]);
        let st: Vec<CubeStatus> = run.report.rows.iter().map(|r| r.status).collect();
        use CubeStatus::*;
        assert_eq!(st, vec![Sat, Unsat, Sat, Unsat, Sat, Unsat]);
        assert_eq!(run.report.satisfiable_cube(), Some(0));
        assert!(run.model.is_some());
    }

    #[test]
    fn journal_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let enc = encode(3, 6, 3, &EncodingOptions::direct()).unwrap();
        let cubes: Vec<Cube> = (0..3).map(|i| Cube { index: i, lits: vec![] }).collect();
        let journal = dir.path().join("run.jsonl");
        // pretend cube 1 finished earlier
        let row = CubeRow {
            index: 1,
            status: CubeStatus::Unsat,
            seconds: 123.0,
            conflicts: 7,
            proof: None,
        };
        fs::write(&journal, format!("{}\n{{\"index\":2,\"sta", serde_json::to_string(&row).unwrap())).unwrap();
        let opts = CubeRunOptions {
            journal: Some(journal.clone()),
            ..CubeRunOptions::default()
        };
        let run = solve_cubes(&enc.formula, &cubes, &opts).unwrap();
        assert!(run.report.all_unsat());
        assert_eq!(run.report.rows[1].seconds, 123.0);
        assert_ne!(run.report.rows[2].seconds, 123.0);
    }

    #[test]
    fn proof_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let enc = encode(3, 6, 3, &EncodingOptions::direct()).unwrap();
        let cubes = vec![Cube { index: 4, lits: vec![] }];
        let opts = CubeRunOptions {
            solve: SolveOptions::default().with_proof(),
            proof_dir: Some(dir.path().to_path_buf()),
            ..CubeRunOptions::default()
        };
        let run = solve_cubes(&enc.formula, &cubes, &opts).unwrap();
        let path = run.report.rows[0].proof.clone().unwrap();
        assert!(path.ends_with("cube-000000004.drat"));
        assert!(fs::read_to_string(path).unwrap().trim_end().ends_with('0'));
    }

    #[test]
    fn template_needs_placeholder() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            run_external(&Formula::new(0), "solver --quiet", dir.path()),
            Err(EngineError::Argument(_))
        ));
    }

    #[test]
    fn report_csv() {
        let report = CubeRunReport {
            rows: vec![CubeRow {
                index: 0,
                status: CubeStatus::Unsat,
                seconds: 0.5,
                conflicts: 3,
                proof: None,
            }],
        };
        assert_eq!(report.to_csv(), "index,status,seconds,conflicts,proof\n0,Unsat,0.500000,3,\n");
        assert_eq!(report.avg_seconds(), 0.5);
        assert_eq!(report.status(), SolveStatus::Unsat);
    }
}
