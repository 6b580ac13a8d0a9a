use hyperlag::extremal::{
    frankl_furedi_report, stanley_check, verify_bound, verify_degree_lemma, verify_shadow_bound, Claim,
    VerifyConfig,
};
use hyperlag::hypergraph::parse_hypergraph;
use hyperlag::spectral::{self, clique_number as clique};
use hyperlag::{nikiforov_bound, BoundContext, Error, SolverConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::BudgetExceeded { .. } | Error::Numerical(_) => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn solver(p: f64, restarts: usize, seed: u64) -> SolverConfig {
    SolverConfig {
        p,
        restarts,
        seed,
        ..SolverConfig::default()
    }
}

/// An r-uniform hypergraph on vertices 1..=n.
#[pyclass(name = "Hypergraph", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHypergraph {
    inner: hyperlag::Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(n: usize, r: usize, edges: Vec<Vec<u32>>) -> PyResult<Self> {
        let inner = hyperlag::Hypergraph::new(n, r, edges).map_err(to_py)?;
        Ok(PyHypergraph { inner })
    }

    /// Parses the text or JSON hypergraph format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = parse_hypergraph(text).map_err(to_py)?;
        Ok(PyHypergraph { inner })
    }

    #[staticmethod]
    fn complete(s: usize, r: usize) -> PyResult<Self> {
        let inner = hyperlag::Hypergraph::complete(s, r).map_err(to_py)?;
        Ok(PyHypergraph { inner })
    }

    /// The first m r-sets in colex order.
    #[staticmethod]
    fn colex(m: usize, r: usize) -> PyResult<Self> {
        let inner = hyperlag::Hypergraph::colex_prefix(m, r).map_err(to_py)?;
        Ok(PyHypergraph { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<Vec<u32>> {
        self.inner.edges().iter().map(|e| e.vertices().to_vec()).collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn is_isomorphic(&self, other: &PyHypergraph) -> PyResult<bool> {
        self.inner.is_isomorphic(&other.inner).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.m()
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph(n={}, r={}, m={})", self.inner.n(), self.inner.r(), self.inner.m())
    }
}

#[pyclass(name = "Solution", frozen)]
struct PySolution {
    inner: hyperlag::SpectralSolution,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn vector(&self) -> Vec<f64> {
        self.inner.vector.entries.clone()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn support(&self) -> Vec<u32> {
        self.inner.support.clone()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn restarts_used(&self) -> usize {
        self.inner.restarts_used
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(rho={}, residual={:e}, converged={})",
            self.inner.rho,
            self.inner.residual,
            if self.inner.converged { "True" } else { "False" }
        )
    }
}

#[pyfunction]
#[pyo3(signature = (h, p = 1.0, restarts = 32, seed = 0))]
fn solve_rho(py: Python<'_>, h: &PyHypergraph, p: f64, restarts: usize, seed: u64) -> PyResult<PySolution> {
    let cfg = solver(p, restarts, seed);
    let inner = py
        .detach(|| spectral::solve_rho(&h.inner, p, &cfg))
        .map_err(to_py)?;
    Ok(PySolution { inner })
}

#[pyfunction]
#[pyo3(signature = (h, restarts = 32, seed = 0))]
fn lagrangian(py: Python<'_>, h: &PyHypergraph, restarts: usize, seed: u64) -> PyResult<f64> {
    let cfg = solver(1.0, restarts, seed);
    py.detach(|| spectral::lagrangian(&h.inner, &cfg)).map_err(to_py)
}

#[pyfunction]
fn clique_number(h: &PyHypergraph) -> PyResult<usize> {
    clique(&h.inner).map_err(to_py)
}

/// `r m / s^{r/p}` where `s` solves `C(s, r) = m`.
#[pyfunction]
#[pyo3(signature = (r, m, p = 1.0))]
fn bound(r: usize, m: f64, p: f64) -> PyResult<f64> {
    let ctx = BoundContext::new(r, m, p).map_err(to_py)?;
    Ok(nikiforov_bound(&ctx))
}

/// Runs a verification sweep and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (claim, r = 3, p = 1.0, m_max = 6, n_max = 7, s_max = 8, oracle = true, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    claim: &str,
    r: usize,
    p: f64,
    m_max: usize,
    n_max: usize,
    s_max: usize,
    oracle: bool,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let claim = Claim::parse(claim).ok_or_else(|| PyValueError::new_err(format!("unknown claim {claim:?}")))?;
    let mut cfg = VerifyConfig {
        solver: solver(p, SolverConfig::default().restarts, seed),
        ..VerifyConfig::default()
    };
    if !oracle {
        cfg.oracle = None;
    }
    let report = py
        .detach(|| match claim {
            Claim::RhoBound => verify_bound(r, p, m_max, n_max, &cfg),
            Claim::Degree => verify_degree_lemma(r, m_max, n_max, &cfg),
            Claim::Shadow => verify_shadow_bound(r, m_max, n_max, &cfg),
            Claim::Stanley => stanley_check(s_max, &cfg),
            Claim::FranklFuredi => frankl_furedi_report(r, m_max, &cfg),
        })
        .map_err(to_py)?;
    json_to_py(py, &report.to_json())
}

#[pymodule]
fn pyhyperlag(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve_rho, m)?)?;
    m.add_function(wrap_pyfunction!(lagrangian, m)?)?;
    m.add_function(wrap_pyfunction!(clique_number, m)?)?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
