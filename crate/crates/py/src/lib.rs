//! Python bindings: encodings, the embedded solver, cube generation and
//! the checked proof pipeline.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use packsat::cnf::Lit;
use packsat::encoder::{self, default_symmetry_layers, EncodingOptions};
use packsat::engine::{self, Budget, SolveOptions, SolveStatus};
use packsat::grid::{self, Vertex};
use packsat::proof::{self, PriorBound, UnsatEvidence};
use packsat::splitter::{self, CubeLayout, SplitParams};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Sat => "SAT",
        SolveStatus::Unsat => "UNSAT",
        SolveStatus::Unknown => "UNKNOWN",
    }
}

fn lits(clause: &[i32]) -> PyResult<Vec<Lit>> {
    clause
        .iter()
        .map(|&x| Lit::from_dimacs(x).ok_or_else(|| PyValueError::new_err("0 is not a literal")))
        .collect()
}

/// A packing coloring of a diamond.
#[pyclass(name = "Coloring", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyColoring {
    inner: grid::Coloring,
}

#[pymethods]
impl PyColoring {
    /// Builds a coloring from `(x, y, color)` triples.
    #[new]
    fn new(radius: u32, cells: Vec<(i32, i32, u32)>) -> PyResult<Self> {
        let map = cells.into_iter().map(|(x, y, c)| (Vertex::new(x, y), c)).collect();
        let inner = grid::Coloring::from_map(radius, &map).map_err(value_err)?;
        Ok(PyColoring { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyColoring {
            inner: grid::Coloring::from_text(text).map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn radius(&self) -> u32 {
        self.inner.radius()
    }

    fn color(&self, x: i32, y: i32) -> Option<u32> {
        self.inner.color(Vertex::new(x, y))
    }

    fn cells(&self) -> Vec<(i32, i32, u32)> {
        self.inner.iter().map(|(v, c)| (v.x, v.y, c)).collect()
    }

    /// `None` when valid, else `((ux, uy), (vx, vy), color)` of a clash.
    #[allow(clippy::type_complexity)]
    fn violation(&self) -> Option<((i32, i32), (i32, i32), u32)> {
        match grid::verify_coloring(&self.inner) {
            grid::Verdict::Valid => None,
            grid::Verdict::Violation { u, v, color } => Some(((u.x, u.y), (v.x, v.y), color)),
        }
    }

    fn is_valid(&self) -> bool {
        grid::verify_coloring(&self.inner).is_valid()
    }

    fn __len__(&self) -> usize {
        self.inner.colors().len()
    }

    fn __repr__(&self) -> String {
        format!("Coloring(radius={}, max_color={})", self.inner.radius(), self.inner.max_color())
    }
}

/// Outcome of a solver run.
#[pyclass(name = "SolveResult", frozen, get_all)]
struct PySolveResult {
    status: String,
    conflicts: u64,
    decisions: u64,
    seconds: f64,
    coloring: Option<PyColoring>,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!("SolveResult(status={}, conflicts={}, seconds={:.3})", self.status, self.conflicts, self.seconds)
    }
}

/// The CNF of one instance `D(r, k, c)`.
#[pyclass(name = "Encoding", frozen)]
struct PyEncoding {
    inner: encoder::Encoding,
    c: u32,
}

#[pymethods]
impl PyEncoding {
    #[getter]
    fn num_vars(&self) -> u32 {
        self.inner.formula.num_vars()
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.inner.formula.num_clauses()
    }

    #[getter]
    fn variant(&self) -> String {
        self.inner.formula.descriptor().map_or("direct".into(), |d| d.variant.to_string())
    }

    fn clauses(&self) -> Vec<Vec<i32>> {
        self.inner
            .formula
            .clauses()
            .iter()
            .map(|c| c.lits().iter().map(|l| l.dimacs()).collect())
            .collect()
    }

    fn to_dimacs(&self) -> String {
        String::from_utf8(self.inner.formula.to_dimacs()).expect("DIMACS is ASCII")
    }

    /// Centers of the plus-shaped regions, closest first.
    fn region_centers(&self) -> Vec<(i32, i32)> {
        self.inner.regions.iter().map(|s| (s.center.x, s.center.y)).collect()
    }

    /// DIMACS variable of `x(v, t)`.
    fn vertex_var(&self, x: i32, y: i32, t: u32) -> PyResult<u32> {
        let v = self.inner.map.vertex_var(Vertex::new(x, y), t).map_err(value_err)?;
        Ok(v.get() + 1)
    }

    #[pyo3(signature = (seed=0, conflicts=None, timeout=None, assumptions=Vec::new()))]
    fn solve(
        &self,
        py: Python<'_>,
        seed: u64,
        conflicts: Option<u64>,
        timeout: Option<f64>,
        assumptions: Vec<i32>,
    ) -> PyResult<PySolveResult> {
        let assumptions = lits(&assumptions)?;
        let opts = SolveOptions {
            seed,
            budget: Budget {
                conflicts,
                time: timeout.map(std::time::Duration::from_secs_f64),
            },
            proof: false,
        };
        let f = &self.inner.formula;
        let res = py
            .detach(|| engine::solve(f, &assumptions, &opts))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let coloring = match &res.model {
            Some(m) => Some(PyColoring {
                inner: engine::extract_centered_coloring(m, &self.inner.map, self.c).map_err(value_err)?,
            }),
            None => None,
        };
        Ok(PySolveResult {
            status: status_name(res.status).into(),
            conflicts: res.stats.conflicts,
            decisions: res.stats.decisions,
            seconds: res.stats.wall.as_secs_f64(),
            coloring,
        })
    }

    /// PTR cubes over this encoding's regions, as DIMACS literal lists.
    fn cubes(&self, p: u32, t: u32, regions: u32) -> PyResult<Vec<Vec<i32>>> {
        let params = SplitParams::new(p, t, regions, self.inner.map.k(), self.c);
        let layout = CubeLayout::new(&params, &self.inner.regions, &self.inner.map).map_err(value_err)?;
        Ok(layout.cubes().map(|c| c.lits.iter().map(|l| l.dimacs()).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Encoding({}, vars={}, clauses={})",
            self.variant(),
            self.num_vars(),
            self.num_clauses()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (r, k, c, variant="plus", alod=false, symmetry=false, chessboard=false))]
fn encode(r: u32, k: u32, c: u32, variant: &str, alod: bool, symmetry: bool, chessboard: bool) -> PyResult<PyEncoding> {
    let mut opts = match variant {
        "plus" => EncodingOptions::plus(),
        "direct" => EncodingOptions::direct(),
        other => return Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    };
    opts = opts.with_alod(alod).with_chessboard(chessboard);
    if symmetry {
        opts = opts.with_symmetry(default_symmetry_layers(k));
    }
    let inner = encoder::encode(r, k, c, &opts).map_err(value_err)?;
    Ok(PyEncoding { inner, c })
}

#[pyfunction]
fn amod_count(r: u32, t: u32) -> u64 {
    encoder::amod_count(r, t)
}

#[pyfunction]
fn count_cubes(p: u32, t: u32, regions: u32) -> u128 {
    splitter::count_cubes(p, t, regions)
}

/// Whether the cubes (DIMACS literal lists) cover every assignment.
#[pyfunction]
fn check_tautology(cubes: Vec<Vec<i32>>) -> PyResult<bool> {
    let cubes: Vec<Vec<Lit>> = cubes.iter().map(|c| lits(c)).collect::<PyResult<_>>()?;
    Ok(splitter::check_tautology(&cubes))
}

/// Forward-checks a DRAT proof (text) against a DIMACS formula (text).
/// Returns True when every step checks and the empty clause is derived.
#[pyfunction]
fn check_drat(py: Python<'_>, dimacs: &str, drat: &str) -> PyResult<bool> {
    let f = packsat::cnf::parse_dimacs_str(dimacs).map_err(value_err)?;
    let steps = proof::parse_drat_str(drat).map_err(value_err)?;
    Ok(py.detach(|| proof::check_steps(&f, &steps, &[])).is_ok_and(|o| o.refuted))
}

/// Runs re-encoding, implication and tautology proofs and checks their
/// concatenation against the direct encoding.
#[pyfunction]
#[pyo3(signature = (r, k, c, split=None, alod=false, prior=None))]
fn run_pipeline(
    py: Python<'_>,
    r: u32,
    k: u32,
    c: u32,
    split: Option<(u32, u32, u32)>,
    alod: bool,
    prior: Option<u32>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let mut cfg = proof::PipelineConfig::new(r, k, c);
    cfg.alod = alod;
    cfg.split = split;
    let out = py
        .detach(|| proof::run_pipeline(&cfg))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("status", status_name(out.status))?;
    d.set_item("cubes", out.report.rows.len())?;
    d.set_item("solve_seconds", out.solve_time.as_secs_f64())?;
    if let (Some(p), Some(check)) = (&out.pipeline, &out.check) {
        d.set_item("steps", p.steps.len())?;
        d.set_item("digest", p.digest())?;
        d.set_item("check_seconds", check.stats.wall.as_secs_f64())?;
        d.set_item("refuted", check.refuted)?;
        let evidence = UnsatEvidence::from_pipeline(&out.descriptor, p, check);
        let prior = PriorBound {
            value: prior.unwrap_or(k),
            source: "caller".into(),
        };
        if let Ok(cert) = proof::certify_bound(r, k, c, prior, &evidence) {
            d.set_item("certificate", cert.to_json())?;
            d.set_item("conclusion", cert.conclusion)?;
        }
    }
    Ok(d.unbind())
}

#[pymodule]
fn pypacksat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyColoring>()?;
    m.add_class::<PyEncoding>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(amod_count, m)?)?;
    m.add_function(wrap_pyfunction!(count_cubes, m)?)?;
    m.add_function(wrap_pyfunction!(check_tautology, m)?)?;
    m.add_function(wrap_pyfunction!(check_drat, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
