//! Python bindings. Integers cross the boundary as Python `int`, so values
//! of any size round-trip exactly.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use d4verify::bounds;
use d4verify::pell::{self, Epsilon};
use d4verify::reduction::{self, ReductionTranscript};
use d4verify::tuples::{self, DTriple};
use d4verify::{Error, Integer, PrecisionPolicy};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn policy(precision: u32, cap: u32) -> PyResult<PrecisionPolicy> {
    PrecisionPolicy::new(precision, cap).map_err(to_py)
}

/// True when `xy + 4` is a square for every pair of distinct elements.
#[pyfunction]
fn is_d4_tuple(xs: Vec<Integer>) -> PyResult<bool> {
    tuples::is_d4_tuple(&xs).map_err(to_py)
}

/// `(d_minus, d_plus)` for the triple `{a, b, c}`.
#[pyfunction]
fn regular_extensions(a: Integer, b: Integer, c: Integer) -> PyResult<(Integer, Integer)> {
    let t = DTriple::new(a, b, c).map_err(to_py)?;
    let ext = tuples::regular_extensions(&t);
    Ok((ext.d_minus, ext.d_plus))
}

#[pyfunction]
fn b_nu(a: Integer, nu: usize) -> PyResult<Integer> {
    pell::b_nu(&a, nu).map_err(to_py)
}

/// Solutions of `v_m = w_n` as `(epsilon, m, n, z, c)` tuples.
#[pyfunction]
#[pyo3(signature = (a, b, m_max=100))]
fn find_intersections(
    a: Integer,
    b: Integer,
    m_max: u64,
) -> PyResult<Vec<(i64, u64, u64, Integer, Integer)>> {
    let found = pell::find_intersections(&a, &b, m_max).map_err(to_py)?;
    Ok(found
        .into_iter()
        .map(|s| (s.epsilon.value(), s.m, s.n, s.z, s.derived_c))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (b, precision=256, cap=16384))]
fn sextuple_m_bound(b: Integer, precision: u32, cap: u32) -> PyResult<Integer> {
    bounds::sextuple_m_bound(&b, policy(precision, cap)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, b, precision=256, cap=16384))]
fn hypergeometric_eliminates(a: Integer, b: Integer, precision: u32, cap: u32) -> PyResult<bool> {
    bounds::hypergeometric_eliminates(&a, &b, policy(precision, cap)?).map_err(to_py)
}

/// Closed-form enclosure of `v_m` rounded to the certified integer.
#[pyfunction]
#[pyo3(signature = (a, b, m, epsilon=1, precision=256, cap=16384))]
fn closed_form_v(a: Integer, b: Integer, m: u64, epsilon: i64, precision: u32, cap: u32) -> PyResult<Integer> {
    let eps = Epsilon::from_value(epsilon).map_err(to_py)?;
    let ctx = pell::PairContext::new(&a, &b, eps).map_err(to_py)?;
    pell::closed_form_v(&ctx, m, policy(precision, cap)?).map_err(to_py)
}

#[pyclass(name = "Transcript", frozen)]
struct PyTranscript(ReductionTranscript);

#[pymethods]
impl PyTranscript {
    #[getter]
    fn a(&self) -> Integer {
        self.0.a.clone()
    }

    #[getter]
    fn b(&self) -> Integer {
        self.0.b.clone()
    }

    #[getter]
    fn m0(&self) -> Integer {
        self.0.m0.clone()
    }

    #[getter]
    fn final_m(&self) -> Integer {
        self.0.final_m.clone()
    }

    #[getter]
    fn steps(&self) -> u32 {
        self.0.steps
    }

    #[getter]
    fn precision_used(&self) -> u32 {
        self.0.precision_used
    }

    #[getter]
    fn resolved(&self) -> bool {
        self.0.resolved
    }

    fn round_bounds(&self) -> Vec<Integer> {
        self.0.round_bounds()
    }

    /// One JSON object per branch and round.
    fn to_jsonl(&self) -> PyResult<String> {
        self.0.to_jsonl().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Transcript(a={}, b={}, M0={}, final_M={}, steps={})",
            self.0.a, self.0.b, self.0.m0, self.0.final_m, self.0.steps
        )
    }
}

#[pyfunction]
#[pyo3(signature = (a, b, m0, max_steps=5, precision=256, cap=16384))]
fn reduce_pair(
    py: Python<'_>,
    a: Integer,
    b: Integer,
    m0: Integer,
    max_steps: u32,
    precision: u32,
    cap: u32,
) -> PyResult<PyTranscript> {
    let p = policy(precision, cap)?;
    let t = py
        .detach(|| reduction::reduce_pair(&a, &b, &m0, max_steps, p))
        .map_err(to_py)?;
    Ok(PyTranscript(t))
}

#[pymodule]
fn _d4verify(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(is_d4_tuple, m)?)?;
    m.add_function(wrap_pyfunction!(regular_extensions, m)?)?;
    m.add_function(wrap_pyfunction!(b_nu, m)?)?;
    m.add_function(wrap_pyfunction!(find_intersections, m)?)?;
    m.add_function(wrap_pyfunction!(sextuple_m_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hypergeometric_eliminates, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_v, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_pair, m)?)?;
    m.add_class::<PyTranscript>()?;
    Ok(())
}
