//! Python bindings. Structured results are returned as plain dicts and lists
//! built from the same JSON the command-line tool emits.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use phaselimit::optimizer::{self, DEFAULT_MEAN_TOL};
use phaselimit::phasedist::DEFAULT_ENTROPY_GRID;
use phaselimit::{bounds, canonical_distribution, povm, CostKind, DimPolicy, Error, EstimatePOM, ProbeState};

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_kind(kind: &str) -> PyResult<CostKind> {
    kind.parse().map_err(py_err)
}

fn policy(dim: Option<usize>) -> PyResult<DimPolicy> {
    match dim {
        Some(0) => Err(PyValueError::new_err("dim must be positive")),
        Some(d) => Ok(DimPolicy::starting_at(d)),
        None => Ok(DimPolicy::auto()),
    }
}

/// Normalized probe state `Σ c_n |n⟩`.
#[pyclass(name = "ProbeState", module = "phaselimit", frozen)]
struct PyProbeState {
    inner: ProbeState,
}

#[pymethods]
impl PyProbeState {
    /// Normalizes the given amplitudes (complex or real).
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        ProbeState::new(amplitudes).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn vacuum() -> Self {
        Self { inner: ProbeState::vacuum() }
    }

    #[staticmethod]
    fn fock(n: usize, dim: usize) -> PyResult<Self> {
        ProbeState::fock(n, dim).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn uniform(k: usize) -> PyResult<Self> {
        ProbeState::uniform(k).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (dim, seed = 0))]
    fn random(dim: usize, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ProbeState::random(dim, &mut rng).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.number_distribution().probabilities().to_vec()
    }

    fn mean_number(&self) -> f64 {
        self.inner.mean_number()
    }

    fn number_entropy(&self) -> f64 {
        self.inner.number_entropy()
    }

    fn tail_mass(&self) -> f64 {
        self.inner.tail_mass()
    }

    /// Moments `⟨e^{ikΘ}⟩` of the canonical phase distribution.
    fn phase_moments(&self) -> Vec<Complex64> {
        canonical_distribution(&self.inner).moments().to_vec()
    }

    /// `⟨θ²⟩` of the canonical phase distribution over `[-π, π)`.
    fn mean_square_deviation(&self) -> f64 {
        canonical_distribution(&self.inner).mean_square_deviation()
    }

    /// `|⟨e^{iΘ}⟩|⁻² - 1`; infinite when the first moment vanishes.
    fn holevo_variance(&self) -> f64 {
        let h = canonical_distribution(&self.inner).holevo_variance();
        if h.is_unbounded() {
            f64::INFINITY
        } else {
            h.value()
        }
    }

    /// Canonical phase entropy; a fixed `grid` must agree with its doubling,
    /// otherwise the grid is refined from the default.
    #[pyo3(signature = (grid = None))]
    fn phase_entropy(&self, grid: Option<usize>) -> PyResult<f64> {
        let dist = canonical_distribution(&self.inner);
        match grid {
            Some(g) => dist.differential_entropy(g),
            None => dist.refined_entropy(DEFAULT_ENTROPY_GRID),
        }
        .map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("ProbeState(dim={}, mean_number={})", self.inner.dim(), self.inner.mean_number())
    }
}

/// `{"k_A": ..., "k_C": ..., "z_A": ...}`.
#[pyfunction]
fn constants<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    let z_a = bounds::airy_first_zero().map_err(py_err)?;
    to_py(
        py,
        &serde_json::json!({"k_A": bounds::k_a(), "k_C": bounds::k_c(), "z_A": z_a}),
    )
}

#[pyfunction]
fn heisenberg_bound(mean_number: f64) -> PyResult<f64> {
    bounds::heisenberg_bound(mean_number).map_err(py_err)
}

#[pyfunction]
fn conjectured_bound(mean_number: f64) -> PyResult<f64> {
    bounds::conjectured_bound(mean_number).map_err(py_err)
}

/// Entropic bound chain for the canonical phase distribution of `state`.
#[pyfunction]
fn entropy_chain_report<'py>(py: Python<'py>, state: &PyProbeState) -> PyResult<Bound<'py, PyAny>> {
    let report = bounds::entropy_chain_report(&state.inner).map_err(py_err)?;
    to_py(py, &report)
}

/// Minimum-error real probe at the given mean number.
#[pyfunction]
#[pyo3(signature = (mean, kind = "exact", dim = None, mean_tol = DEFAULT_MEAN_TOL))]
fn optimize_at_mean<'py>(
    py: Python<'py>,
    mean: f64,
    kind: &str,
    dim: Option<usize>,
    mean_tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = parse_kind(kind)?;
    let policy = policy(dim)?;
    let r = py
        .detach(|| optimizer::optimize_at_mean(kind, mean, &policy, mean_tol))
        .map_err(py_err)?;
    let amplitudes: Vec<f64> = r.state.amplitudes().iter().map(|c| c.re).collect();
    to_py(
        py,
        &serde_json::json!({
            "kind": kind,
            "target_mean": mean,
            "achieved_mean": r.achieved_mean,
            "cost": r.cost,
            "delta": r.delta(),
            "product": r.product(),
            "lambda": r.lambda,
            "eigenvalue": r.eigenvalue,
            "dim": r.dim,
            "tail_mass": r.tail_mass,
            "residual": r.residual,
            "iterations": r.iterations,
            "amplitudes": amplitudes,
        }),
    )
}

/// Rows of (mean, dim, lambda, cost, delta, product, ...) for each mean.
#[pyfunction]
#[pyo3(signature = (means, kind = "exact", dim = None, mean_tol = DEFAULT_MEAN_TOL))]
fn figure2_curve<'py>(
    py: Python<'py>,
    means: Vec<f64>,
    kind: &str,
    dim: Option<usize>,
    mean_tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = parse_kind(kind)?;
    let policy = policy(dim)?;
    let rows = py
        .detach(|| optimizer::figure2_curve(kind, &means, &policy, mean_tol))
        .map_err(py_err)?;
    to_py(py, &rows)
}

/// Perfect discrimination of `k` equally spaced phases.
#[pyfunction]
fn kphase<'py>(py: Python<'py>, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let demo = povm::kphase_construction(k).map_err(py_err)?;
    let averaged = povm::average_distribution(&demo.povm, &demo.state).map_err(py_err)?;
    to_py(
        py,
        &serde_json::json!({
            "K": k,
            "mean_number": demo.mean_number,
            "gram_deviation": demo.gram_deviation(),
            "success_probabilities": demo.success_probabilities,
            "errors_at_special_phases": demo.errors_at_special_phases,
            "averaged_delta": averaged.mean_square_deviation().sqrt(),
        }),
    )
}

/// Phase-averaged error distribution of a measurement (given as JSON) on `state`.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, povm_json: &str, state: &PyProbeState) -> PyResult<Bound<'py, PyAny>> {
    let pom: EstimatePOM = serde_json::from_str(povm_json).map_err(|e| py_err(Error::Json(e)))?;
    let dist = povm::average_distribution(&pom, &state.inner).map_err(py_err)?;
    let numbers = state.inner.number_distribution();
    let report = bounds::bound_report(&dist, &numbers).map_err(py_err)?;
    let moments: Vec<[f64; 2]> = dist.moments().iter().map(|m| [m.re, m.im]).collect();
    to_py(
        py,
        &serde_json::json!({
            "mean_number": numbers.mean(),
            "moments": moments,
            "mean_square_deviation": dist.mean_square_deviation(),
            "delta": dist.mean_square_deviation().sqrt(),
            "holevo_variance": dist.holevo_variance(),
            "heisenberg_bound": bounds::heisenberg_bound(numbers.mean()).map_err(py_err)?,
            "report": report,
        }),
    )
}

#[pymodule]
#[pyo3(name = "phaselimit")]
fn phaselimit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProbeState>()?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg_bound, m)?)?;
    m.add_function(wrap_pyfunction!(conjectured_bound, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_chain_report, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_at_mean, m)?)?;
    m.add_function(wrap_pyfunction!(figure2_curve, m)?)?;
    m.add_function(wrap_pyfunction!(kphase, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
