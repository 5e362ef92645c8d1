//! Python bindings for `avn-core`.
//!
//! Structured results (certificates, estimates, sweeps) are returned as plain
//! dicts and lists with the same field names as the CLI's JSON output.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use avn_core::experiment::{self, DEFAULT_SEED, DEFAULT_SHOTS, LHV_BOUND};
use avn_core::hilbert::{self, C64};
use avn_core::lhv;
use avn_core::observables::{self, BellBasis, BellLabel};
use avn_core::optics;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A normalized-or-not ket of dimension 2, 4, 8 or 16.
#[pyclass(name = "StateVector", module = "avn", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStateVector {
    inner: hilbert::StateVector,
}

#[pymethods]
impl PyStateVector {
    #[new]
    fn new(amplitudes: Vec<C64>) -> PyResult<Self> {
        hilbert::StateVector::new(amplitudes)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    /// The computational basis ket `|index⟩` in dimension `dim`.
    #[staticmethod]
    fn basis(dim: usize, index: usize) -> PyResult<Self> {
        hilbert::StateVector::basis(dim, index)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amps().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    fn norm(&self) -> f64 {
        self.inner.norm_sqr().sqrt()
    }

    fn normalized(&self) -> Self {
        Self {
            inner: self.inner.normalized(),
        }
    }

    /// `⟨self|other⟩`.
    fn inner(&self, other: &PyStateVector) -> PyResult<C64> {
        self.inner.inner(&other.inner).map_err(value_error)
    }

    fn tensor(&self, other: &PyStateVector) -> PyResult<Self> {
        self.inner
            .tensor(&other.inner)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        let amps: Vec<String> = self
            .inner
            .amps()
            .iter()
            .map(|a| format!("({}{:+}j)", a.re, a.im))
            .collect();
        format!("StateVector([{}])", amps.join(", "))
    }
}

/// The doubly entangled two-photon state on the 16-dimensional space.
#[pyfunction]
fn psi() -> PyStateVector {
    PyStateVector {
        inner: observables::build_psi(),
    }
}

/// One `{id, eigenvalue, residual}` dict per constraint row.
#[pyfunction]
fn verify_eigenequations(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &observables::verify_eigenequations())
}

/// The nine products as strings, e.g. `"z1z1'·z2·z2'"`.
#[pyfunction]
fn constraint_rows() -> Vec<(u8, String, i8)> {
    observables::constraint_rows()
        .into_iter()
        .map(|r| (r.id, r.product.to_string(), r.eigenvalue))
        .collect()
}

/// `⟨state|O|state⟩` for the Bell–Mermin operator; defaults to the entangled state.
#[pyfunction]
#[pyo3(signature = (state=None))]
fn mermin_expectation(state: Option<&PyStateVector>) -> PyResult<f64> {
    let o = observables::build_mermin().realization;
    match state {
        Some(s) => o.expectation(&s.inner),
        None => o.expectation(&observables::build_psi()),
    }
    .map_err(value_error)
}

/// Exact `⟨O⟩` for the white-noise mixture at visibility `v`.
#[pyfunction]
fn noisy_mermin_expectation(visibility: f64) -> PyResult<f64> {
    let state = experiment::noisy_state(visibility).map_err(value_error)?;
    experiment::exact_expectation(experiment::Quantity::Mermin, &state).map_err(value_error)
}

/// The exhaustive local-realistic scan and parity certificate.
#[pyfunction]
fn lhv_certificate(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &lhv::contradiction_certificate())
}

#[pyfunction]
fn lhv_certificate_text() -> String {
    lhv::contradiction_certificate().to_text()
}

/// Optical elements, measured quantities and detector labels of apparatus 1–6.
#[pyfunction]
fn apparatus(py: Python<'_>, id: u8) -> PyResult<Bound<'_, PyAny>> {
    let spec = optics::build_apparatus(id).map_err(value_error)?;
    to_py(py, &spec.describe())
}

#[pyfunction]
fn apparatus_text(id: u8) -> PyResult<String> {
    let spec = optics::build_apparatus(id).map_err(value_error)?;
    Ok(spec.describe().to_text())
}

/// Sampled estimate of `⟨O⟩` from the nine apparatus pairings.
#[pyfunction]
#[pyo3(name = "estimate_O", signature = (shots=DEFAULT_SHOTS, visibility=1.0, seed=DEFAULT_SEED))]
fn estimate_o(
    py: Python<'_>,
    shots: u64,
    visibility: f64,
    seed: u64,
) -> PyResult<Bound<'_, PyAny>> {
    let est = experiment::estimate_O(shots, visibility, seed).map_err(value_error)?;
    to_py(py, &est)
}

/// Exact and sampled `⟨O⟩` over a visibility grid.
#[pyfunction]
#[pyo3(signature = (grid=None, shots=DEFAULT_SHOTS, seed=DEFAULT_SEED))]
fn visibility_sweep(
    py: Python<'_>,
    grid: Option<Vec<f64>>,
    shots: u64,
    seed: u64,
) -> PyResult<Bound<'_, PyAny>> {
    let grid = grid.unwrap_or_else(experiment::default_grid);
    let rows = experiment::visibility_sweep(&grid, shots, seed).map_err(value_error)?;
    to_py(py, &rows)
}

/// Local means and correlations for one photon-1 / photon-2 apparatus pair.
#[pyfunction]
#[pyo3(signature = (alice, bob, shots=DEFAULT_SHOTS, visibility=1.0, seed=DEFAULT_SEED))]
fn simulate_pair(
    py: Python<'_>,
    alice: u8,
    bob: u8,
    shots: u64,
    visibility: f64,
    seed: u64,
) -> PyResult<Bound<'_, PyAny>> {
    let sim =
        experiment::simulate_pair(alice, bob, shots, visibility, seed).map_err(value_error)?;
    to_py(py, &sim)
}

/// The four single-photon Bell states in the order psi+, psi-, phi+, phi-.
#[pyfunction]
fn bell_states() -> Vec<(String, PyStateVector)> {
    BellLabel::ALL
        .iter()
        .zip(observables::build_bell_states(BellBasis::PolPath))
        .map(|(l, s)| (l.ascii().to_string(), PyStateVector { inner: s }))
        .collect()
}

/// Detector probabilities of the Bell analyzer as `(label, p)` pairs.
#[pyfunction]
fn bell_probabilities(state: &PyStateVector) -> PyResult<Vec<(String, f64)>> {
    let p = optics::bell_probabilities(&state.inner).map_err(value_error)?;
    Ok(BellLabel::ALL
        .iter()
        .map(|l| (l.ascii().to_string(), p[l.position()]))
        .collect())
}

/// Run the Bell analyzer `shots` times; returns `(label, count)` pairs.
#[pyfunction]
#[pyo3(signature = (state, shots=1, seed=DEFAULT_SEED))]
fn bell_discriminate(state: &PyStateVector, shots: u64, seed: u64) -> PyResult<Vec<(String, u64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let label = optics::bell_discriminate(&state.inner, &mut rng).map_err(value_error)?;
        counts[label.position()] += 1;
    }
    Ok(BellLabel::ALL
        .iter()
        .map(|l| (l.ascii().to_string(), counts[l.position()]))
        .collect())
}

#[pymodule]
fn avn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateVector>()?;
    m.add("LHV_BOUND", LHV_BOUND)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add("DEFAULT_SHOTS", DEFAULT_SHOTS)?;
    m.add("THRESHOLD_VISIBILITY", experiment::threshold_visibility())?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(verify_eigenequations, m)?)?;
    m.add_function(wrap_pyfunction!(constraint_rows, m)?)?;
    m.add_function(wrap_pyfunction!(mermin_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_mermin_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_certificate_text, m)?)?;
    m.add_function(wrap_pyfunction!(apparatus, m)?)?;
    m.add_function(wrap_pyfunction!(apparatus_text, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_o, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_pair, m)?)?;
    m.add_function(wrap_pyfunction!(bell_states, m)?)?;
    m.add_function(wrap_pyfunction!(bell_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(bell_discriminate, m)?)?;
    Ok(())
}
