//! Python bindings: meshes, convolution settings, shape functions, the material model, scenario runs
//! and the verification and convergence suites.

use std::path::PathBuf;

use nalgebra::Matrix3;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use chidenn::convergence::{convergence_study, Problem, StudyMode};
use chidenn::interp::{chidenn_shape, BasisTable};
use chidenn::meshgen;

/// Validation errors become `ValueError`, numerical failures `RuntimeError`.
fn py_err(e: chidenn::Error) -> PyErr {
    if e.exit_code() == 2 {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix3<f64>> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("expected a 3x3 nested list"));
    }
    Ok(Matrix3::from_fn(|i, j| rows[i][j]))
}

fn rows(m: &Matrix3<f64>) -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

#[pyclass(name = "Mesh", module = "pychidenn")]
#[derive(Clone)]
struct PyMesh {
    inner: chidenn::mesh::Mesh,
}

#[pymethods]
impl PyMesh {
    /// Parses the structured mesh text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyMesh { inner: chidenn::mesh::parse_mesh(text).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (nx=15, ny=30, width=0.3, height=1.0, radius=0.1, region_radius=0.2))]
    fn notched_plate(nx: usize, ny: usize, width: f64, height: f64, radius: f64, region_radius: f64) -> PyResult<Self> {
        let plate = meshgen::NotchedPlate { width, height, radius, nx, ny, region_radius };
        Ok(PyMesh { inner: plate.build().map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (nx, ny, lx=1.0, ly=1.0))]
    fn quad_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        Ok(PyMesh { inner: meshgen::quad_grid(nx, ny, lx, ly).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, length=1.0))]
    fn bar(n: usize, length: f64) -> PyResult<Self> {
        Ok(PyMesh { inner: meshgen::bar(0.0, length, n).map_err(py_err)? })
    }

    fn refine(&self, k: usize) -> PyResult<Self> {
        Ok(PyMesh { inner: meshgen::refine_quads(&self.inner, k).map_err(py_err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn element_count(&self) -> usize {
        self.inner.elements.len()
    }

    #[getter]
    fn nodes(&self) -> Vec<Vec<f64>> {
        self.inner.nodes.iter().map(|x| x[..self.inner.dim].to_vec()).collect()
    }

    fn node_set(&self, name: &str) -> PyResult<Vec<usize>> {
        Ok(self.inner.node_set(name).map_err(py_err)?.to_vec())
    }

    fn nearest_node(&self, point: Vec<f64>) -> usize {
        let mut p = [0.0; 3];
        for (k, v) in point.iter().take(3).enumerate() {
            p[k] = *v;
        }
        self.inner.nearest_node(p)
    }

    fn __repr__(&self) -> String {
        format!("Mesh(dim={}, nodes={}, elements={})", self.inner.dim, self.inner.node_count(), self.inner.elements.len())
    }
}

#[pyclass(name = "ConvolutionConfig", module = "pychidenn")]
#[derive(Clone)]
struct PyConvolutionConfig {
    inner: chidenn::interp::ConvolutionConfig,
}

#[pymethods]
impl PyConvolutionConfig {
    /// Multiquadric radial-basis patch functions.
    #[staticmethod]
    #[pyo3(signature = (s, p, a=1.0))]
    fn rbf(s: usize, p: usize, a: f64) -> Self {
        PyConvolutionConfig { inner: chidenn::interp::ConvolutionConfig::rbf(s, p, a) }
    }

    /// One-dimensional Lagrange patch functions.
    #[staticmethod]
    fn lagrange(s: usize, p: usize) -> Self {
        PyConvolutionConfig { inner: chidenn::interp::ConvolutionConfig::lagrange(s, p) }
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    fn __repr__(&self) -> String {
        self.inner.describe()
    }
}

/// Shape functions of `element` at parent point `xi`. Plain finite elements when `config` is None.
#[pyfunction]
#[pyo3(signature = (mesh, element, xi, config=None))]
fn shape(py: Python<'_>, mesh: &PyMesh, element: usize, xi: Vec<f64>, config: Option<&PyConvolutionConfig>) -> PyResult<PyObject> {
    if element >= mesh.inner.elements.len() {
        return Err(PyValueError::new_err(format!("element {element} out of range")));
    }
    let mut parent = [0.0; 3];
    for (k, v) in xi.iter().take(3).enumerate() {
        parent[k] = *v;
    }
    let bases = config.map(|c| BasisTable::build_all(&mesh.inner, &c.inner)).transpose().map_err(py_err)?;
    let s = chidenn_shape(&mesh.inner, element, parent, bases.as_ref()).map_err(py_err)?;
    let dim = mesh.inner.dim;
    let out = PyDict::new_bound(py);
    out.set_item("nodes", s.nodes)?;
    out.set_item("values", s.values)?;
    out.set_item("grads", s.grads.iter().map(|g| g[..dim].to_vec()).collect::<Vec<_>>())?;
    out.set_item("x", s.x[..dim].to_vec())?;
    out.set_item("jacobian_det", s.jacobian_det)?;
    Ok(out.into())
}

#[pyclass(name = "NeoHookean", module = "pychidenn")]
#[derive(Clone)]
struct PyNeoHookean {
    inner: chidenn::material::NeoHookean,
}

#[pymethods]
impl PyNeoHookean {
    #[new]
    fn new(c10: f64, d1: f64, rho0: f64) -> PyResult<Self> {
        Ok(PyNeoHookean { inner: chidenn::material::NeoHookean::new(c10, d1, rho0).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_moduli(mu0: f64, k0: f64, rho0: f64) -> PyResult<Self> {
        Ok(PyNeoHookean { inner: chidenn::material::NeoHookean::from_moduli(mu0, k0, rho0).map_err(py_err)? })
    }

    #[getter]
    fn shear_modulus(&self) -> f64 {
        self.inner.shear_modulus()
    }

    #[getter]
    fn bulk_modulus(&self) -> f64 {
        self.inner.bulk_modulus()
    }

    #[getter]
    fn wave_speed(&self) -> f64 {
        self.inner.wave_speed()
    }

    fn strain_energy(&self, f: Vec<Vec<f64>>) -> PyResult<f64> {
        self.inner.strain_energy(&matrix(f)?).map_err(py_err)
    }

    fn pk1_stress(&self, f: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.pk1_stress(&matrix(f)?).map_err(py_err)?))
    }

    fn cauchy_stress(&self, f: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.cauchy_stress(&matrix(f)?).map_err(py_err)?))
    }

    fn von_mises(&self, f: Vec<Vec<f64>>) -> PyResult<f64> {
        self.inner.von_mises(&matrix(f)?).map_err(py_err)
    }
}

/// Runs a scenario file; returns the output paths, kernel description and phase timings.
#[pyfunction]
#[pyo3(signature = (path, out_dir=None))]
fn run_scenario(py: Python<'_>, path: PathBuf, out_dir: Option<PathBuf>) -> PyResult<PyObject> {
    let summary = py.allow_threads(|| chidenn::scenario::run_scenario(&path, out_dir.as_deref())).map_err(py_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("csv", summary.csv)?;
    out.set_item("snapshots", summary.snapshots)?;
    out.set_item("kernel", summary.kernel)?;
    out.set_item("dt_crit", summary.dt_crit)?;
    let t = summary.timings;
    let timings = PyDict::new_bound(py);
    for (k, v) in [("setup", t.setup), ("bases", t.bases), ("tables", t.tables), ("mass", t.mass), ("solve", t.solve), ("per_step", t.per_step)] {
        timings.set_item(k, v)?;
    }
    out.set_item("timings", timings)?;
    out.set_item("final_displacement", summary.final_state.d)?;
    Ok(out.into())
}

/// Runs the property suites; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (level="fast"))]
fn verify(py: Python<'_>, level: &str) -> PyResult<(bool, String)> {
    let level: chidenn::verify::Level = level.parse().map_err(py_err)?;
    let report = py.allow_threads(|| chidenn::verify::verify_suite(level));
    Ok((report.passed(), report.render()))
}

/// Manufactured-solution study; returns `{mode label: (errors, rate)}`.
#[pyfunction]
#[pyo3(signature = (problem, refinements, modes=vec!["fem".to_string(), "chidenn".to_string()]))]
fn convergence(py: Python<'_>, problem: &str, refinements: Vec<usize>, modes: Vec<String>) -> PyResult<PyObject> {
    let problem: Problem = problem.parse().map_err(py_err)?;
    let modes = modes
        .iter()
        .map(|m| match m.as_str() {
            "fem" => Ok(StudyMode::Fem),
            "chidenn" => Ok(StudyMode::chidenn_default(problem)),
            other => Err(PyValueError::new_err(format!("unknown mode '{other}' (expected fem or chidenn)"))),
        })
        .collect::<PyResult<Vec<_>>>()?;
    let table = py.allow_threads(|| convergence_study(problem, &refinements, &modes)).map_err(py_err)?;
    let out = PyDict::new_bound(py);
    for m in &table.modes {
        let errors: Vec<Option<f64>> = m.levels.iter().map(|l| l.error.as_ref().ok().copied()).collect();
        out.set_item(m.mode.label(), (errors, m.rate))?;
    }
    Ok(out.into())
}

/// Constant-F patch test on a distorted 8x8 quad mesh; returns `(F error, residual ratio)`.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn patch_test(config: Option<&PyConvolutionConfig>) -> PyResult<(f64, f64)> {
    let r = chidenn::verify::patch_test(config.map(|c| &c.inner), None, 0.0).map_err(py_err)?;
    Ok((r.f_error, r.residual_ratio))
}

#[pymodule]
fn pychidenn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyConvolutionConfig>()?;
    m.add_class::<PyNeoHookean>()?;
    m.add_function(wrap_pyfunction!(shape, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(patch_test, m)?)?;
    Ok(())
}
