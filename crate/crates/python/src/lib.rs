//! Python bindings. Words cross the boundary as strings over the
//! presentation's alphabet; exact rationals as `fractions.Fraction`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyTuple;

use hypnorm::bound::{self, BoundCertificate, LocalGeodesicConstants};
use hypnorm::error::Error;
use hypnorm::group::GroupPresentation;
use hypnorm::metric::{PeriodicPath, WordMetric, DEFAULT_RMAX};
use hypnorm::rational::{self, Rational};
use hypnorm::stable_norm;
use hypnorm::verify;
use hypnorm::words::Word;

create_exception!(pyhypnorm, HypnormError, PyValueError);

fn err(e: Error) -> PyErr {
    HypnormError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn parse_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    rational::parse(&value.str()?.to_cow()?).map_err(err)
}

#[pyclass(name = "Presentation", module = "pyhypnorm", frozen)]
struct PyPresentation {
    inner: GroupPresentation,
}

impl PyPresentation {
    fn word(&self, text: &str) -> PyResult<Word> {
        self.inner.parse_word(text).map_err(err)
    }
}

#[pymethods]
impl PyPresentation {
    /// A built-in name (`F1`, `F2`, `F3`, `surface2`) or a presentation file path.
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        Ok(PyPresentation { inner: GroupPresentation::resolve(source).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyPresentation { inner: GroupPresentation::parse(text).map_err(err)? })
    }

    #[getter]
    fn generators(&self) -> String {
        self.inner.alphabet().symbols().iter().collect()
    }

    #[getter]
    fn relators(&self) -> Vec<String> {
        self.inner.relators().iter().map(|r| self.inner.render(r)).collect()
    }

    #[getter]
    fn strategy(&self) -> String {
        self.inner.strategy().to_string()
    }

    #[getter]
    fn delta<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner.delta().map(|d| fraction(py, d)).transpose()
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.is_certified()
    }

    fn free_reduce(&self, w: &str) -> PyResult<String> {
        Ok(self.inner.render(&self.word(w)?.free_reduce()))
    }

    fn dehn_reduce(&self, w: &str) -> PyResult<String> {
        Ok(self.inner.render(&self.inner.dehn_reduce(&self.word(w)?)))
    }

    fn is_identity(&self, w: &str) -> PyResult<bool> {
        self.inner.is_identity(&self.word(w)?).map_err(err)
    }

    fn equal(&self, a: &str, b: &str) -> PyResult<bool> {
        self.inner.equal(&self.word(a)?, &self.word(b)?).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Presentation(generators={:?}, relators={:?}, strategy={:?})",
            self.generators(),
            self.relators(),
            self.strategy()
        )
    }
}

#[pyclass(name = "Constants", module = "pyhypnorm", frozen)]
struct PyConstants {
    inner: LocalGeodesicConstants,
}

#[pymethods]
impl PyConstants {
    /// Constants derived from a hyperbolicity constant (int, str or Fraction).
    #[staticmethod]
    fn from_delta(delta: &Bound<'_, PyAny>) -> PyResult<Self> {
        let d = parse_rational(delta)?;
        Ok(PyConstants { inner: LocalGeodesicConstants::from_delta(&d).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (k, lam, eps))]
    fn user(k: usize, lam: &Bound<'_, PyAny>, eps: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = LocalGeodesicConstants::user(k, parse_rational(lam)?, parse_rational(eps)?).map_err(err)?;
        Ok(PyConstants { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn lam<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.lambda)
    }

    #[getter]
    fn eps<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.eps)
    }

    fn __repr__(&self) -> String {
        format!("Constants({})", self.inner)
    }
}

#[pyclass(name = "StableNormEstimate", module = "pyhypnorm", frozen, get_all)]
struct PyEstimate {
    lower: Py<PyAny>,
    upper: Py<PyAny>,
    terms: usize,
    method: String,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self, py: Python<'_>) -> PyResult<String> {
        Ok(format!(
            "StableNormEstimate(lower={}, upper={}, terms={}, method={:?})",
            self.lower.bind(py).str()?,
            self.upper.bind(py).str()?,
            self.terms,
            self.method
        ))
    }
}

#[pyclass(name = "Certificate", module = "pyhypnorm", frozen)]
struct PyCertificate {
    inner: BoundCertificate,
    presentation: GroupPresentation,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max
    }

    #[getter]
    fn k_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.k_bound)
    }

    #[getter]
    fn ball_radius(&self) -> usize {
        self.inner.ball_radius
    }

    /// `(word, outcome)` pairs over the ball of radius k-1.
    #[getter]
    fn table(&self) -> Vec<(String, String)> {
        self.inner
            .table
            .iter()
            .map(|(w, o)| (self.presentation.render(w), o.to_string()))
            .collect()
    }

    fn report(&self) -> String {
        self.inner.report(self.presentation.alphabet())
    }
}

#[pyclass(name = "Metric", module = "pyhypnorm", frozen)]
struct PyMetric {
    inner: WordMetric,
}

impl PyMetric {
    fn word(&self, text: &str) -> PyResult<Word> {
        self.inner.presentation().parse_word(text).map_err(err)
    }

    fn render(&self, w: &Word) -> String {
        self.inner.presentation().render(w)
    }
}

#[pymethods]
impl PyMetric {
    #[new]
    #[pyo3(signature = (presentation, rmax = DEFAULT_RMAX))]
    fn new(presentation: &PyPresentation, rmax: usize) -> PyResult<Self> {
        let inner = WordMetric::with_rmax(presentation.inner.clone(), rmax).map_err(err)?;
        Ok(PyMetric { inner })
    }

    #[getter]
    fn rmax(&self) -> usize {
        self.inner.rmax()
    }

    fn element_length(&self, w: &str) -> PyResult<usize> {
        self.inner.element_length(&self.word(w)?).map_err(err)
    }

    fn distance(&self, a: &str, b: &str) -> PyResult<usize> {
        self.inner.distance(&self.word(a)?, &self.word(b)?).map_err(err)
    }

    fn is_geodesic(&self, w: &str) -> PyResult<bool> {
        self.inner.is_geodesic(&self.word(w)?).map_err(err)
    }

    fn normal_form(&self, w: &str) -> PyResult<String> {
        Ok(self.render(&self.inner.normal_form(&self.word(w)?).map_err(err)?))
    }

    fn ball(&self, radius: usize) -> PyResult<Vec<String>> {
        let ball = self.inner.ball(radius).map_err(err)?;
        Ok(ball.entries().iter().map(|e| self.render(&e.normal_form)).collect())
    }

    fn is_k_local_geodesic(&self, period: &str, k: usize) -> PyResult<bool> {
        let path = PeriodicPath::new(self.word(period)?).map_err(err)?;
        self.inner.is_k_local_geodesic(&path, k).map_err(err)
    }

    /// Returns `(geodesic, cyclically_reduced, conjugator)`.
    fn cyclically_reduce(&self, w: &str) -> PyResult<(String, String, String)> {
        let r = stable_norm::cyclically_reduce(&self.inner, &self.word(w)?).map_err(err)?;
        Ok((self.render(&r.geodesic), self.render(&r.reduced), self.render(&r.conjugator)))
    }

    fn power_lengths(&self, w: &str, terms: usize) -> PyResult<Vec<usize>> {
        stable_norm::power_lengths(&self.inner, &self.word(w)?, terms).map_err(err)
    }

    #[pyo3(signature = (w, terms = 10, constants = None))]
    fn stable_norm(&self, py: Python<'_>, w: &str, terms: usize, constants: Option<&PyConstants>) -> PyResult<PyEstimate> {
        let e = stable_norm::stable_norm_estimate(&self.inner, &self.word(w)?, terms, constants.map(|c| &c.inner))
            .map_err(err)?;
        Ok(PyEstimate {
            lower: fraction(py, &e.lower)?.unbind(),
            upper: fraction(py, &e.upper)?.unbind(),
            terms: e.terms_used,
            method: e.lower_method.to_string(),
        })
    }

    fn lower_bound<'py>(&self, py: Python<'py>, w: &str, constants: &PyConstants) -> PyResult<Bound<'py, PyTuple>> {
        let (value, method) = bound::element_lower_bound(&self.inner, &self.word(w)?, &constants.inner).map_err(err)?;
        PyTuple::new(py, [fraction(py, &value)?, method.to_string().into_pyobject(py)?.into_any()])
    }

    fn certificate(&self, py: Python<'_>, constants: &PyConstants) -> PyResult<PyCertificate> {
        let inner = py
            .detach(|| bound::compute_certificate(&self.inner, &constants.inner))
            .map_err(err)?;
        Ok(PyCertificate { inner, presentation: self.inner.presentation().clone() })
    }

    /// Runs the invariant suite; returns one `PASS`/`FAIL`/`SKIP` line per family.
    #[pyo3(signature = (constants = None, terms = 10, seed = 0))]
    fn verify(&self, py: Python<'_>, constants: Option<&PyConstants>, terms: usize, seed: u64) -> Vec<String> {
        let c = constants.map(|c| &c.inner);
        py.detach(|| verify::run_suite(&self.inner, c, terms, seed))
            .iter()
            .map(|o| o.to_string())
            .collect()
    }
}

/// Exact stable norm in a free group: cyclically reduced length.
#[pyfunction]
fn free_stable_norm(presentation: &PyPresentation, w: &str) -> PyResult<usize> {
    stable_norm::free_oracle_stable_norm(&presentation.inner, &presentation.word(w)?).map_err(err)
}

#[pymodule]
fn pyhypnorm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyMetric>()?;
    m.add_class::<PyConstants>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(free_stable_norm, m)?)?;
    m.add("HypnormError", m.py().get_type::<HypnormError>())?;
    Ok(())
}
