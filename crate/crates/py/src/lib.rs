//! Python bindings: grids, states, operators and the exact distance solver.

use std::sync::Arc;

use ccrm::closed_form;
use ccrm::{Distance, Topology};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: ccrm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn as_float(d: Distance) -> f64 {
    d.as_f64()
}

#[pyclass(name = "Grid", frozen)]
struct PyGrid(Arc<ccrm::Grid>);

#[pymethods]
impl PyGrid {
    #[staticmethod]
    fn line(a: f64, b: f64, spacing: f64) -> PyResult<Self> {
        Ok(PyGrid(ccrm::Grid::line(a, b, spacing).map_err(err)?.into_shared()))
    }

    #[staticmethod]
    fn circle(n: usize) -> PyResult<Self> {
        Ok(PyGrid(ccrm::Grid::circle(n).map_err(err)?.into_shared()))
    }

    #[staticmethod]
    #[pyo3(signature = (anchor, q, depth, both = true))]
    fn qlattice(anchor: f64, q: f64, depth: usize, both: bool) -> PyResult<Self> {
        let signs = if both { ccrm::SignSet::Both } else { ccrm::SignSet::PositiveOnly };
        Ok(PyGrid(ccrm::Grid::q_lattice(anchor, q, depth, signs).map_err(err)?.into_shared()))
    }

    /// Parses `line:a:b:step`, `circle:N` or `qlattice:anchor:q:depth[:both|positive]`.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        Ok(PyGrid(ccrm::cli::parse_grid(spec).map_err(err)?.into_shared()))
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().to_vec()
    }

    #[getter]
    fn topology(&self) -> &'static str {
        self.0.topology().name()
    }

    #[getter]
    fn spacing(&self) -> Option<f64> {
        self.0.spacing()
    }

    fn nearest_node(&self, x: f64) -> PyResult<usize> {
        self.0.nearest_node(x).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Grid('{}')", self.0.id())
    }
}

#[pyclass(name = "State", frozen)]
struct PyState(ccrm::StateMeasure);

#[pymethods]
impl PyState {
    #[staticmethod]
    fn point(grid: &PyGrid, x: f64) -> PyResult<Self> {
        Ok(PyState(ccrm::StateMeasure::point(&grid.0, x).map_err(err)?))
    }

    #[staticmethod]
    fn rect(grid: &PyGrid, center: f64, halfwidth: f64) -> PyResult<Self> {
        Ok(PyState(ccrm::StateMeasure::rect(&grid.0, center, halfwidth).map_err(err)?))
    }

    #[staticmethod]
    fn density(grid: &PyGrid, center: f64, halfwidth: f64, samples: Vec<f64>) -> PyResult<Self> {
        Ok(PyState(ccrm::StateMeasure::density(&grid.0, center, halfwidth, &samples).map_err(err)?))
    }

    #[staticmethod]
    fn from_weights(grid: &PyGrid, weights: Vec<f64>) -> PyResult<Self> {
        Ok(PyState(ccrm::StateMeasure::from_weights(&grid.0, weights).map_err(err)?))
    }

    fn translate(&self, shift: f64) -> PyResult<Self> {
        Ok(PyState(self.0.translate(shift).map_err(err)?))
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn expectation(&self, f: Vec<f64>) -> PyResult<f64> {
        self.0.expectation(&f).map_err(err)
    }
}

#[pyclass(name = "Operator", frozen)]
struct PyOperator(ccrm::OperatorSpec);

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn standard() -> Self {
        PyOperator(ccrm::OperatorSpec::Standard)
    }

    /// Non-flat metric from samples `(xs, G(xs))`.
    #[staticmethod]
    fn nonflat(xs: Vec<f64>, g: Vec<f64>) -> PyResult<Self> {
        let g = ccrm::SampledFn::new(xs, g).map_err(err)?;
        Ok(PyOperator(ccrm::OperatorSpec::NonFlat { g }))
    }

    #[staticmethod]
    fn hderiv(h: f64) -> Self {
        PyOperator(ccrm::OperatorSpec::HDeriv { h })
    }

    #[staticmethod]
    fn qderiv(q: f64) -> Self {
        PyOperator(ccrm::OperatorSpec::QDeriv { q })
    }

    #[staticmethod]
    fn rank1(grid: &PyGrid, psi: Vec<f64>) -> PyResult<Self> {
        Ok(PyOperator(ccrm::OperatorSpec::rank_one(&grid.0, psi).map_err(err)?))
    }

    #[staticmethod]
    fn parse(spec: &str, grid: &PyGrid) -> PyResult<Self> {
        Ok(PyOperator(ccrm::cli::parse_operator(spec, &grid.0).map_err(err)?))
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn operator_norm(&self) -> Option<f64> {
        self.0.operator_norm()
    }

    /// Constraint-graph edges as `(u, v, length)` triples.
    fn compile(&self, grid: &PyGrid) -> PyResult<Vec<(usize, usize, f64)>> {
        let g = ccrm::compile(&self.0, &grid.0).map_err(err)?;
        Ok(g.edges().iter().map(|e| (e.u, e.v, e.length)).collect())
    }

    fn seminorm(&self, grid: &PyGrid, f: Vec<f64>) -> PyResult<f64> {
        ccrm::seminorm(&self.0, &grid.0, &f).map_err(err)
    }
}

/// Exact distance between two states on the same grid. Returns a dict with
/// `value` (`inf` when infinite), `witness`, `plan` and, on circles under the
/// standard operator, `cut_node`.
#[pyfunction]
fn spectral_distance<'py>(
    py: Python<'py>,
    op: &PyOperator,
    mu: &PyState,
    nu: &PyState,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = mu.0.grid();
    let g = ccrm::compile(&op.0, grid).map_err(err)?;
    let r = ccrm::spectral_distance(&g, &mu.0, &nu.0).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("value", as_float(r.value))?;
    out.set_item("witness", r.witness)?;
    let plan: Option<Vec<(usize, usize, f64)>> =
        r.plan.map(|p| p.iter().map(|e| (e.source, e.target, e.mass)).collect());
    out.set_item("plan", plan)?;
    if grid.topology() == Topology::Circle && op.0 == ccrm::OperatorSpec::Standard {
        let (_, cut) = ccrm::circle_w1_cut(grid, &mu.0, &nu.0).map_err(err)?;
        out.set_item("cut_node", cut)?;
    }
    Ok(out)
}

#[pyfunction]
fn h_distance(h: f64, x: f64, y: f64) -> f64 {
    as_float(closed_form::h_distance(h, x, y))
}

/// Rectangles of full width `eps`.
#[pyfunction]
fn fat_distance(h: f64, eps: f64, x: f64, y: f64) -> f64 {
    as_float(closed_form::fat_distance(h, eps, x, y))
}

/// `(lower, upper, exact)` with `exact = None` when unknown.
#[pyfunction]
fn q_bounds(q: f64, x: f64, y: f64) -> PyResult<(f64, f64, Option<f64>)> {
    let b = closed_form::q_bounds(q, x, y).map_err(err)?;
    Ok((b.lower, b.upper, b.exact))
}

/// Rectangles of halfwidth `eps` on the circle, centred at 0 and `x`.
#[pyfunction]
fn circle_rect_distance(eps: f64, x: f64) -> PyResult<f64> {
    closed_form::circle_rect_distance(eps, x).map_err(err)
}

#[pyfunction]
fn cut_point(eps: f64, x: f64) -> PyResult<f64> {
    closed_form::cut_point(eps, x).map_err(err)
}

#[pyfunction]
fn geodesic_distance(xs: Vec<f64>, g: Vec<f64>, x: f64, y: f64) -> PyResult<f64> {
    let g = ccrm::SampledFn::new(xs, g).map_err(err)?;
    closed_form::geodesic_distance(&g, x, y).map_err(err)
}

#[pyfunction]
fn min_length_bound(operator_norm: f64) -> f64 {
    closed_form::min_length_bound(operator_norm)
}

#[pymodule(name = "ccrm")]
fn ccrm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(spectral_distance, m)?)?;
    m.add_function(wrap_pyfunction!(h_distance, m)?)?;
    m.add_function(wrap_pyfunction!(fat_distance, m)?)?;
    m.add_function(wrap_pyfunction!(q_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(circle_rect_distance, m)?)?;
    m.add_function(wrap_pyfunction!(cut_point, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_distance, m)?)?;
    m.add_function(wrap_pyfunction!(min_length_bound, m)?)?;
    Ok(())
}
