//! Python bindings. Matrices travel as nested lists, reports as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use hypcompact_core::diagnostics::{self, ActionModel, Geodesic, GridSpec, SmoothnessProbe};
use hypcompact_core::lorentz::{self, GeneratorKind};
use hypcompact_core::symbolic::{parse_field, PolyVectorField};
use hypcompact_core::{actions, fields, models, Model};
use nalgebra::DMatrix;

fn err(e: hypcompact_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix_from_rows(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn action_model(name: &str) -> PyResult<ActionModel> {
    name.parse().map_err(err)
}

/// An element of `so(n,1)`.
#[pyclass(name = "AlgebraElement", module = "hypcompact", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAlgebraElement(lorentz::AlgebraElement);

#[pymethods]
impl PyAlgebraElement {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self(lorentz::AlgebraElement::new(matrix_from_rows(rows)?).map_err(err)?))
    }

    /// Named generator: `H`, `X1`, `Y2`, `R12`.
    #[staticmethod]
    fn generator(kind: &str, n: usize) -> PyResult<Self> {
        let kind: GeneratorKind = kind.parse().map_err(err)?;
        Ok(Self(lorentz::generator(kind, n).map_err(err)?))
    }

    /// Linear combination of the basis `H, X_i, Y_i, R_jk`.
    #[staticmethod]
    fn combination(n: usize, coefficients: Vec<f64>) -> PyResult<Self> {
        Ok(Self(lorentz::AlgebraElement::combination(n, &coefficients).map_err(err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn tag(&self) -> Option<String> {
        self.0.tag().map(|t| t.to_string())
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows_of(self.0.matrix())
    }

    fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    fn bracket(&self, other: &Self) -> Self {
        Self(self.0.bracket(&other.0))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    fn exp(&self) -> PyGroupElement {
        PyGroupElement(lorentz::group_exp(&self.0))
    }

    fn __repr__(&self) -> String {
        match self.0.tag() {
            Some(t) => format!("AlgebraElement({t}, n={})", self.0.n()),
            None => format!("AlgebraElement(n={})", self.0.n()),
        }
    }
}

/// An element of `SO₀(n,1)`.
#[pyclass(name = "GroupElement", module = "hypcompact", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroupElement(lorentz::GroupElement);

#[pymethods]
impl PyGroupElement {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self(lorentz::GroupElement::new(matrix_from_rows(rows)?).map_err(err)?))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(lorentz::GroupElement::identity(n))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows_of(self.0.matrix())
    }

    fn __matmul__(&self, other: &Self) -> Self {
        Self(self.0.compose(&other.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `‖mᵀJm − J‖`.
    fn residual(&self) -> f64 {
        self.0.residual()
    }

    fn __repr__(&self) -> String {
        format!("GroupElement(n={})", self.0.n())
    }
}

/// A point of one of the models; `coords=None` is the chart point at infinity.
#[pyclass(name = "ModelPoint", module = "hypcompact", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModelPoint(models::ModelPoint);

#[pymethods]
impl PyModelPoint {
    #[new]
    #[pyo3(signature = (model, coords=None, n=None))]
    fn new(model: &str, coords: Option<Vec<f64>>, n: Option<usize>) -> PyResult<Self> {
        let model: Model = model.parse().map_err(err)?;
        let p = match (coords, n) {
            (Some(c), _) => models::ModelPoint::new(model, c),
            (None, Some(n)) => models::ModelPoint::infinity(model, n),
            (None, None) => return Err(PyValueError::new_err("infinity needs n")),
        };
        Ok(Self(p.map_err(err)?))
    }

    #[getter]
    fn model(&self) -> String {
        self.0.model().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// Coordinates, or `None` at infinity.
    #[getter]
    fn coords(&self) -> Option<Vec<f64>> {
        self.0.finite().map(<[f64]>::to_vec)
    }

    fn is_infinity(&self) -> bool {
        self.0.is_infinity()
    }

    #[pyo3(signature = (tol=1e-10))]
    fn is_boundary(&self, tol: f64) -> bool {
        self.0.is_boundary(tol)
    }

    fn to_model(&self, model: &str) -> PyResult<Self> {
        let target: Model = model.parse().map_err(err)?;
        Ok(Self(self.0.to_model(target).map_err(err)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(models::ModelPoint::from_json(text).map_err(err)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        self.0.to_json()
    }
}

/// Boundary reparametrization, from `p=<int>`, `f1` or `f2`.
#[pyclass(name = "ReparamMap", module = "hypcompact", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyReparamMap(models::ReparamMap);

#[pymethods]
impl PyReparamMap {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self(spec.parse().map_err(err)?))
    }

    fn eval(&self, y: f64) -> f64 {
        self.0.eval(y)
    }

    fn deriv(&self, y: f64) -> f64 {
        self.0.deriv(y)
    }

    /// `(f/f′)(y)`.
    fn ratio(&self, y: f64) -> PyResult<f64> {
        fields::f_over_fprime(&self.0, y).map_err(err)
    }

    fn inverse(&self, z: f64) -> PyResult<f64> {
        self.0.inverse(z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ReparamMap({})", self.0)
    }
}

/// Exact polynomial vector field on the half-space.
#[pyclass(name = "PolyVectorField", module = "hypcompact", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolyVectorField(PolyVectorField);

#[pymethods]
impl PyPolyVectorField {
    #[new]
    fn new(text: &str, n: usize) -> PyResult<Self> {
        Ok(Self(parse_field(text, n).map_err(err)?))
    }

    #[staticmethod]
    fn generator(kind: &str, n: usize) -> PyResult<Self> {
        let kind: GeneratorKind = kind.parse().map_err(err)?;
        Ok(Self(hypcompact_core::symbolic::generator_field(kind, n).map_err(err)?))
    }

    fn pullback(&self, p: i64) -> PyResult<Self> {
        Ok(Self(self.0.pullback_monomial(p).map_err(err)?))
    }

    fn is_analytic(&self) -> bool {
        self.0.is_analytic()
    }

    fn is_boundary_tangent(&self) -> bool {
        self.0.is_boundary_tangent()
    }

    fn first_non_analytic(&self) -> Option<String> {
        self.0.first_non_analytic().map(|t| t.monomial_string(self.0.n()))
    }

    fn evaluate(&self, point: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.evaluate(&point).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self(self.0.add(&other.0).map_err(err)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PolyVectorField({:?}, n={})", self.0.to_string(), self.0.n())
    }
}

#[pyfunction]
fn minkowski(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    lorentz::minkowski(&u, &v).map_err(err)
}

#[pyfunction]
fn symmetry_through_geodesic(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<PyGroupElement>> {
    Ok(lorentz::symmetry_through_geodesic(&a, &b)
        .map_err(err)?
        .into_iter()
        .map(PyGroupElement)
        .collect())
}

#[pyfunction]
fn act_proj(g: &PyGroupElement, k: &PyModelPoint) -> PyResult<PyModelPoint> {
    Ok(PyModelPoint(actions::act_proj(&g.0, &k.0).map_err(err)?))
}

#[pyfunction]
fn act_conf(g: &PyGroupElement, p: &PyModelPoint) -> PyResult<PyModelPoint> {
    Ok(PyModelPoint(actions::act_conf(&g.0, &p.0).map_err(err)?))
}

/// The conformal action read in the half-space chart `ChartPC`.
#[pyfunction]
fn act_conf_in_chart_pc(g: &PyGroupElement, q: &PyModelPoint) -> PyResult<PyModelPoint> {
    Ok(PyModelPoint(actions::act_conf_in_chart_pc(&g.0, &q.0).map_err(err)?))
}

#[pyfunction]
fn act_reparam(f: &PyReparamMap, g: &PyGroupElement, q: &PyModelPoint) -> PyResult<PyModelPoint> {
    Ok(PyModelPoint(actions::act_reparam(&f.0, &g.0, &q.0).map_err(err)?))
}

#[pyfunction]
fn proj_field(x: &PyAlgebraElement, q: &PyModelPoint) -> PyResult<Vec<f64>> {
    fields::proj_field(&x.0, &q.0).map_err(err)
}

#[pyfunction]
fn pullback_field(f: &PyReparamMap, x: &PyAlgebraElement, q: &PyModelPoint) -> PyResult<Vec<f64>> {
    fields::pullback_field(&f.0, &x.0, &q.0).map_err(err)
}

/// Smoothness report of `f/f′` at 0 as a dict.
#[pyfunction]
#[pyo3(signature = (f, k_max=5))]
fn classify_smoothness<'py>(py: Python<'py>, f: &PyReparamMap, k_max: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = diagnostics::classify_smoothness(
        &SmoothnessProbe::ratio_of(&f.0),
        k_max,
        &GridSpec::default(),
        &Default::default(),
    )
    .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (f, k_max=5))]
fn flatness_order<'py>(py: Python<'py>, f: &PyReparamMap, k_max: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &diagnostics::flatness_order(&f.0, k_max, &Default::default()).map_err(err)?)
}

#[pyfunction]
fn endpoints_under<'py>(py: Python<'py>, f: &PyReparamMap, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let l = Geodesic::new(a, b).map_err(err)?;
    to_py(py, &diagnostics::endpoints_under(&f.0, &l, &Default::default()).map_err(err)?)
}

#[pyfunction]
fn transversality_check<'py>(py: Python<'py>, f: &PyReparamMap, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let l = Geodesic::new(a, b).map_err(err)?;
    to_py(py, &diagnostics::transversality_check(&f.0, &l, &Default::default()).map_err(err)?)
}

/// Boundary angle between two geodesics `(a1, b1)` and `(a2, b2)` sharing
/// an endpoint, in the `proj` or `conf` model.
#[pyfunction]
fn boundary_tangency_angle<'py>(
    py: Python<'py>,
    model: &str,
    g1: (Vec<f64>, Vec<f64>),
    g2: (Vec<f64>, Vec<f64>),
) -> PyResult<Bound<'py, PyAny>> {
    let l1 = Geodesic::new(g1.0, g1.1).map_err(err)?;
    let l2 = Geodesic::new(g2.0, g2.1).map_err(err)?;
    to_py(py, &diagnostics::boundary_tangency_angle(action_model(model)?, &l1, &l2).map_err(err)?)
}

/// Hölder exponent of the boundary conjugacy on seeded pairs near `y = 0`.
#[pyfunction]
#[pyo3(signature = (source, target, n=2, pairs=400, seed=0))]
fn conjugacy_exponent<'py>(
    py: Python<'py>,
    source: &str,
    target: &str,
    n: usize,
    pairs: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let sample = hypcompact_core::sampling::Sampler::new(n, seed).boundary_pairs(pairs);
    let r = diagnostics::conjugacy_exponent(action_model(source)?, action_model(target)?, &sample)
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn hypcompact(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", hypcompact_core::VERSION)?;
    m.add_class::<PyAlgebraElement>()?;
    m.add_class::<PyGroupElement>()?;
    m.add_class::<PyModelPoint>()?;
    m.add_class::<PyReparamMap>()?;
    m.add_class::<PyPolyVectorField>()?;
    m.add_function(wrap_pyfunction!(minkowski, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_through_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(act_proj, m)?)?;
    m.add_function(wrap_pyfunction!(act_conf, m)?)?;
    m.add_function(wrap_pyfunction!(act_conf_in_chart_pc, m)?)?;
    m.add_function(wrap_pyfunction!(act_reparam, m)?)?;
    m.add_function(wrap_pyfunction!(proj_field, m)?)?;
    m.add_function(wrap_pyfunction!(pullback_field, m)?)?;
    m.add_function(wrap_pyfunction!(classify_smoothness, m)?)?;
    m.add_function(wrap_pyfunction!(flatness_order, m)?)?;
    m.add_function(wrap_pyfunction!(endpoints_under, m)?)?;
    m.add_function(wrap_pyfunction!(transversality_check, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_tangency_angle, m)?)?;
    m.add_function(wrap_pyfunction!(conjugacy_exponent, m)?)?;
    Ok(())
}
