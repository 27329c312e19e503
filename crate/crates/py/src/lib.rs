//! Python bindings: operators, graph points, the analyses, and scene runs.
//! Verdicts and reports come back as plain dicts.

use monolab::catalog::{self, Params};
use monolab::cli::report::to_canonical_string;
use monolab::cli::{parse_scene, run_scene, RunOptions};
use monolab::monocheck::{self, ProbeSettings, DEFAULT_ISC_RADII};
use monolab::normgeom::{self, GraphPoint};
use monolab::opmodel::{self, sample_graph, GraphBox};
use monolab::{exact, resolvent, vardiff, MonoError, NormSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn err(e: MonoError) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code()))
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn graph_box(x: Vec<f64>, v: Vec<f64>, radius: f64, norm: Option<&PyNormSpec>) -> PyResult<GraphBox> {
    let n = x.len();
    let b = GraphBox::new(x, radius, v, radius).map_err(err)?;
    let spec = norm.map_or_else(|| NormSpec::euclidean(n), |s| s.0.clone());
    b.with_norm(spec).map_err(err)
}

#[pyclass(name = "NormSpec", module = "monolab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNormSpec(NormSpec);

#[pymethods]
impl PyNormSpec {
    #[new]
    fn new(p: f64, weights: Vec<f64>) -> PyResult<Self> {
        NormSpec::new(p, weights).map(PyNormSpec).map_err(err)
    }

    #[staticmethod]
    fn euclidean(n: usize) -> Self {
        PyNormSpec(NormSpec::euclidean(n))
    }

    fn norm(&self, x: Vec<f64>) -> f64 {
        self.0.norm(&x)
    }

    fn dual_norm(&self, y: Vec<f64>) -> f64 {
        self.0.dual_norm(&y)
    }

    fn duality_map(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        normgeom::duality_map(&x, &self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("NormSpec(p={}, weights={:?})", self.0.p(), self.0.weights())
    }
}

#[pyclass(name = "Operator", module = "monolab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOperator(opmodel::Operator);

#[pymethods]
impl PyOperator {
    /// Built-in operator by catalog name; parameters are strings as in
    /// scene files.
    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn catalog(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<Self> {
        let params: Params = params.unwrap_or_default();
        catalog::builtin(name, &params).map(PyOperator).map_err(err)
    }

    /// `x -> M x` from rows given as numbers or exact strings like "1/3".
    #[staticmethod]
    fn linear(rows: Vec<Vec<String>>) -> PyResult<Self> {
        let m = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| exact::parse_rat(t).ok_or_else(|| PyValueError::new_err(format!("`{t}` is not a number"))))
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        catalog::linear_graph(&m).map(PyOperator).map_err(err)
    }

    /// Finite graph from `(x, v)` pairs.
    #[staticmethod]
    fn sampled(points: Vec<(Vec<f64>, Vec<f64>)>) -> PyResult<Self> {
        let n = points.first().map_or(0, |p| p.0.len());
        let pts = points
            .into_iter()
            .map(|(x, v)| GraphPoint::new(x, v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        opmodel::Operator::sampled(n, pts).map(PyOperator).map_err(err)
    }

    /// Parses a scene and returns its operator `name`.
    #[staticmethod]
    fn from_scene(text: &str, name: &str) -> PyResult<Self> {
        let s = parse_scene(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        s.operator(name)
            .cloned()
            .map(PyOperator)
            .ok_or_else(|| PyValueError::new_err(format!("no operator `{name}` in scene")))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn describe(&self) -> String {
        self.0.describe()
    }

    #[pyo3(signature = (x, v, tol=1e-9))]
    fn contains(&self, x: Vec<f64>, v: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.0.contains_pair(&x, &v, tol).map_err(err)
    }

    fn __add__(&self, other: &PyOperator) -> PyResult<Self> {
        opmodel::op_sum(&self.0, &other.0).map(PyOperator).map_err(err)
    }

    fn inverse(&self) -> Self {
        PyOperator(opmodel::op_inverse(&self.0))
    }

    #[pyo3(signature = (sigma, norm=None))]
    fn shift(&self, sigma: f64, norm: Option<&PyNormSpec>) -> PyResult<Self> {
        let spec = norm.map_or_else(|| NormSpec::euclidean(self.0.dim()), |s| s.0.clone());
        opmodel::op_shift_j(&self.0, sigma, &spec).map(PyOperator).map_err(err)
    }

    fn scale(&self, factor: f64) -> PyResult<Self> {
        opmodel::op_scale(&self.0, factor).map(PyOperator).map_err(err)
    }

    fn localize(&self, x: Vec<f64>, v: Vec<f64>, radius: f64) -> PyResult<Self> {
        let b = graph_box(x, v, radius, None)?;
        opmodel::op_localize(&self.0, &b).map(PyOperator).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.0.describe())
    }
}

#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::NAMES.to_vec()
}

#[pyfunction]
fn catalog_entry<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &catalog::expected(name).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, density=5, norm=None))]
fn monotone_witness<'py>(
    py: Python<'py>,
    op: &PyOperator,
    x: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
    density: usize,
    norm: Option<&PyNormSpec>,
) -> PyResult<Bound<'py, PyAny>> {
    let b = graph_box(x, v, radius, norm)?;
    let g = sample_graph(&op.0, &b, density).map_err(err)?;
    json_to_py(py, &monocheck::monotone_witness(&g, &b.norm))
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, density=5, norm=None))]
fn strong_modulus(op: &PyOperator, x: Vec<f64>, v: Vec<f64>, radius: f64, density: usize, norm: Option<&PyNormSpec>) -> PyResult<f64> {
    let b = graph_box(x, v, radius, norm)?;
    let g = sample_graph(&op.0, &b, density).map_err(err)?;
    monocheck::strong_modulus(&g, &b.norm).map(|e| e.value).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radii=None, density=9, seed=0))]
fn isc_probe<'py>(
    py: Python<'py>,
    op: &PyOperator,
    x: Vec<f64>,
    v: Vec<f64>,
    radii: Option<Vec<f64>>,
    density: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let pt = GraphPoint::new(x, v).map_err(err)?;
    let radii = radii.unwrap_or(DEFAULT_ISC_RADII.to_vec());
    let s = ProbeSettings { density, seed, tol: None };
    json_to_py(py, &monocheck::isc_probe(&op.0, &pt, &radii, &s).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, density=5))]
fn type_a_witness_search<'py>(py: Python<'py>, op: &PyOperator, x: Vec<f64>, v: Vec<f64>, radius: f64, density: usize) -> PyResult<Bound<'py, PyAny>> {
    let pt = GraphPoint::new(x.clone(), v.clone()).map_err(err)?;
    let b = graph_box(x, v, radius, None)?;
    json_to_py(py, &monocheck::type_a_witness_search(&op.0, &pt, &b, density, None).map_err(err)?)
}

/// Solutions `x` of `y ∈ J(x) + λT(x)` in the box around `(x, v)`.
#[pyfunction]
#[pyo3(signature = (op, lam, y, x, v, radius=1.0, norm=None))]
fn resolvent_solve(
    op: &PyOperator,
    lam: f64,
    y: Vec<f64>,
    x: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
    norm: Option<&PyNormSpec>,
) -> PyResult<(Vec<Vec<f64>>, bool)> {
    let b = graph_box(x, v, radius, norm)?;
    let s = resolvent::resolvent_solve(&op.0, lam, &y, &b.norm, &b).map_err(err)?;
    Ok((s.xs(), s.continuum))
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, lam=1.0, density=5, norm=None))]
#[allow(clippy::too_many_arguments)]
fn minty_local_probe<'py>(
    py: Python<'py>,
    op: &PyOperator,
    x: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
    lam: f64,
    density: usize,
    norm: Option<&PyNormSpec>,
) -> PyResult<Bound<'py, PyAny>> {
    let pt = GraphPoint::new(x.clone(), v.clone()).map_err(err)?;
    let b = graph_box(x, v, radius, norm)?;
    json_to_py(py, &resolvent::minty_local_probe(&op.0, &pt, lam, &b, density, None).map_err(err)?.0)
}

/// Sampled Lipschitz constant of `(T + σI)^(-1)` near `(v + σx, x)`.
#[pyfunction]
#[pyo3(signature = (op, x, v, sigma, radius=1.0, density=5))]
fn transvected_lipschitz(op: &PyOperator, x: Vec<f64>, v: Vec<f64>, sigma: f64, radius: f64, density: usize) -> PyResult<f64> {
    let pt = GraphPoint::new(x.clone(), v.clone()).map_err(err)?;
    let b = graph_box(x, v, radius, None)?;
    let (_, p) = resolvent::transvected_probe(&op.0, &pt, sigma, &b, density, None).map_err(err)?;
    match p.lipschitz {
        Some(l) => Ok(l),
        None => resolvent::localization_lipschitz(&p).map_err(err),
    }
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, sigma=0.0, density=5))]
fn psd_criterion<'py>(py: Python<'py>, op: &PyOperator, x: Vec<f64>, v: Vec<f64>, radius: f64, sigma: f64, density: usize) -> PyResult<Bound<'py, PyAny>> {
    let b = graph_box(x, v, radius, None)?;
    json_to_py(py, &vardiff::psd_criterion(&op.0, &b, sigma, density).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, sigma=0.0, density=5))]
fn local_max_via_coderivative<'py>(
    py: Python<'py>,
    op: &PyOperator,
    x: Vec<f64>,
    v: Vec<f64>,
    radius: f64,
    sigma: f64,
    density: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let pt = GraphPoint::new(x.clone(), v.clone()).map_err(err)?;
    let b = graph_box(x, v, radius, None)?;
    json_to_py(py, &vardiff::local_max_via_coderivative(&op.0, &pt, &b, density, sigma).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (op, x, v, radius=1.0, density=5))]
fn supremal_psd_sigma(op: &PyOperator, x: Vec<f64>, v: Vec<f64>, radius: f64, density: usize) -> PyResult<f64> {
    let b = graph_box(x, v, radius, None)?;
    vardiff::supremal_psd_sigma(&op.0, &b, density).map_err(err)
}

/// Runs a scene and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (text, seed=0))]
fn run<'py>(py: Python<'py>, text: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_scene(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = run_scene(&s, &RunOptions { seed, ..Default::default() });
    py.import("json")?.call_method1("loads", (to_canonical_string(&out.report),))
}

#[pymodule]
fn monolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNormSpec>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_entry, m)?)?;
    m.add_function(wrap_pyfunction!(monotone_witness, m)?)?;
    m.add_function(wrap_pyfunction!(strong_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(isc_probe, m)?)?;
    m.add_function(wrap_pyfunction!(type_a_witness_search, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent_solve, m)?)?;
    m.add_function(wrap_pyfunction!(minty_local_probe, m)?)?;
    m.add_function(wrap_pyfunction!(transvected_lipschitz, m)?)?;
    m.add_function(wrap_pyfunction!(psd_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(local_max_via_coderivative, m)?)?;
    m.add_function(wrap_pyfunction!(supremal_psd_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
