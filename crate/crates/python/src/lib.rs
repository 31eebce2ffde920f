use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use qheis_core::calculus::{PolyFunction, Side};
use qheis_core::json::{expression_from_json, expression_to_json, report_to_json};
use qheis_core::rewrite::{self, Presentation};
use qheis_core::verify::{self as checks, Config};
use qheis_core::{Error, Expression, Scalar};

create_exception!(qheis, QheisError, PyException);
create_exception!(qheis, ParseError, QheisError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Syntax(_) | Error::Json(_) => ParseError::new_err(e.to_string()),
        other => QheisError::new_err(other.to_string()),
    }
}

fn side(name: &str) -> PyResult<Side> {
    match name {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(PyValueError::new_err(format!(
            "side must be 'left' or 'right', not {other:?}"
        ))),
    }
}

fn config(qjk: &str, sign: &str) -> PyResult<Config> {
    Ok(Config {
        qjk: qjk.parse().map_err(PyValueError::new_err)?,
        sign: sign.parse().map_err(PyValueError::new_err)?,
    })
}

/// An element of the tensor algebra, with exact coefficients.
#[pyclass(name = "Expression", module = "qheis", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpression(Expression);

#[derive(FromPyObject)]
enum Operand {
    Expr(PyExpression),
    Int(i64),
}

impl Operand {
    fn into_expression(self) -> Expression {
        match self {
            Operand::Expr(e) => e.0,
            Operand::Int(n) => Expression::scalar(Scalar::from_integer(n)),
        }
    }
}

#[pymethods]
impl PyExpression {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        qheis_core::parse_expression(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ParseError::new_err(e.to_string()))?;
        expression_from_json(&v).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        expression_to_json(&self.0).to_string()
    }

    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn tensor(&self, other: Operand) -> PyResult<Self> {
        self.0
            .tensor(&other.into_expression())
            .map(Self)
            .map_err(err)
    }

    fn __add__(&self, other: Operand) -> Self {
        Self(self.0.add(&other.into_expression()))
    }

    fn __radd__(&self, other: Operand) -> Self {
        Self(other.into_expression().add(&self.0))
    }

    fn __sub__(&self, other: Operand) -> Self {
        Self(self.0.sub(&other.into_expression()))
    }

    fn __rsub__(&self, other: Operand) -> Self {
        Self(other.into_expression().sub(&self.0))
    }

    fn __neg__(&self) -> Self {
        Self(self.0.neg())
    }

    fn __mul__(&self, other: Operand) -> PyResult<Self> {
        self.0.mul(&other.into_expression()).map(Self).map_err(err)
    }

    fn __rmul__(&self, other: Operand) -> PyResult<Self> {
        other.into_expression().mul(&self.0).map(Self).map_err(err)
    }

    fn __pow__(&self, n: u32, _modulo: Option<u32>) -> PyResult<Self> {
        self.0.pow(n).map(Self).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expression({:?})", self.0.to_string())
    }
}

/// An ordered rewrite system with parameter bindings.
#[pyclass(name = "Presentation", module = "qheis", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPresentation(Presentation);

#[pymethods]
impl PyPresentation {
    /// A built-in preset name or a rule file path.
    #[new]
    fn new(name_or_path: &str) -> PyResult<Self> {
        Presentation::load(name_or_path).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(name: &str, text: &str) -> PyResult<Self> {
        Presentation::parse(name, text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn presets() -> Vec<&'static str> {
        Presentation::preset_names()
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    fn with_param(&self, binding: &str) -> PyResult<Self> {
        self.0.clone().with_param(binding).map(Self).map_err(err)
    }

    fn with_budget(&self, budget: usize) -> Self {
        Self(self.0.clone().with_budget(budget))
    }

    fn normalize(&self, e: &PyExpression) -> PyResult<PyExpression> {
        rewrite::normalize(&e.0, &self.0)
            .map(PyExpression)
            .map_err(err)
    }

    /// Normal form of `lhs - rhs`.
    fn check(&self, lhs: &PyExpression, rhs: &PyExpression) -> PyResult<PyExpression> {
        rewrite::check_identity(&lhs.0, &rhs.0, &self.0)
            .map(PyExpression)
            .map_err(err)
    }

    /// `(overlap, first rule, second rule, residual)` for each critical pair.
    #[pyo3(signature = (n = 3))]
    fn critical_pairs(
        &self,
        n: u32,
    ) -> PyResult<Vec<(PyExpression, String, String, PyExpression)>> {
        Ok(rewrite::critical_pairs(&self.0, n)
            .map_err(err)?
            .into_iter()
            .map(|c| {
                (
                    PyExpression(c.overlap),
                    c.first,
                    c.second,
                    PyExpression(c.residual),
                )
            })
            .collect())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?})", self.0.name)
    }
}

/// A polynomial in x0..xm with Clifford (or deformed) coefficients.
#[pyclass(name = "PolyFunction", module = "qheis", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPoly(PolyFunction);

#[pymethods]
impl PyPoly {
    #[new]
    #[pyo3(signature = (text, dim = None))]
    fn new(text: &str, dim: Option<u32>) -> PyResult<Self> {
        PolyFunction::parse(text, dim).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.0.dim()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn partial(&self, j: u32) -> PyResult<Self> {
        self.0.partial(j).map(Self).map_err(err)
    }

    #[pyo3(signature = (side = "left"))]
    fn dirac(&self, side: &str) -> PyResult<Self> {
        self.0.dirac(self::side(side)?).map(Self).map_err(err)
    }

    fn cauchy_riemann(&self) -> PyResult<Self> {
        self.0.cauchy_riemann().map(Self).map_err(err)
    }

    fn difference_op(&self, j: u32, k: u32) -> PyResult<Self> {
        self.0.difference_op(j, k).map(Self).map_err(err)
    }

    /// `(monogenic, dirac image)`.
    #[pyo3(signature = (side = "left"))]
    fn is_monogenic(&self, side: &str) -> PyResult<(bool, Self)> {
        let (ok, w) = self.0.is_monogenic(self::side(side)?).map_err(err)?;
        Ok((ok, Self(w)))
    }

    fn to_expression(&self) -> PyResult<PyExpression> {
        self.0.to_expression().map(PyExpression).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.0.mul(&other.0).map(Self).map_err(err)
    }

    fn __str__(&self) -> String {
        if self.0.is_zero() {
            "0".to_string()
        } else {
            self.0.to_string()
        }
    }

    fn __repr__(&self) -> String {
        format!("PolyFunction({:?}, dim={})", self.__str__(), self.0.dim())
    }
}

#[pyfunction]
fn normalize(e: &PyExpression, preset: &str) -> PyResult<PyExpression> {
    let p = Presentation::load(preset).map_err(err)?;
    rewrite::normalize(&e.0, &p).map(PyExpression).map_err(err)
}

/// Run a named check; each report is a dict
/// `{check, config, relations: [{label, substitutions, residual, residual_text, verdict}]}`.
#[pyfunction]
#[pyo3(signature = (check, qjk = "symbolic", sign = "as-printed"))]
fn verify(py: Python<'_>, check: &str, qjk: &str, sign: &str) -> PyResult<Vec<Py<PyAny>>> {
    let reports = checks::run_check(check, config(qjk, sign)?, None).map_err(err)?;
    let loads = py.import("json")?.getattr("loads")?;
    reports
        .iter()
        .map(|r| Ok(loads.call1((report_to_json(r).to_string(),))?.unbind()))
        .collect()
}

/// `a d - q c b`; the generic entry symbols when called without arguments.
#[pyfunction]
#[pyo3(signature = (a = None, b = None, c = None, d = None))]
fn quantum_det(
    a: Option<PyExpression>,
    b: Option<PyExpression>,
    c: Option<PyExpression>,
    d: Option<PyExpression>,
) -> PyResult<PyExpression> {
    match (a, b, c, d) {
        (None, None, None, None) => checks::quantum_det_generic().map(PyExpression).map_err(err),
        (Some(a), Some(b), Some(c), Some(d)) => checks::quantum_det(&a.0, &b.0, &c.0, &d.0)
            .map(PyExpression)
            .map_err(err),
        _ => Err(PyValueError::new_err("give all four entries or none")),
    }
}

/// `(basis, relation)` pairs from preserving the quantum plane.
#[pyfunction]
fn plane_relations() -> PyResult<Vec<(PyExpression, PyExpression)>> {
    Ok(checks::derive_plane_relations()
        .map_err(err)?
        .into_iter()
        .map(|r| (PyExpression(r.basis), PyExpression(r.relation)))
        .collect())
}

#[pymodule]
fn qheis(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyExpression>()?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyPoly>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_det, m)?)?;
    m.add_function(wrap_pyfunction!(plane_relations, m)?)?;
    m.add("QheisError", py.get_type::<QheisError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("CHECKS", checks::CHECKS.to_vec())?;
    Ok(())
}
