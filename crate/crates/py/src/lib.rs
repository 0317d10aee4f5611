//! Python bindings for `dsx-core`. Exact quantities cross the boundary as
//! `fractions.Fraction`; diagnostic logarithms as floats.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dsx_core::arith::{self, Rational};
use dsx_core::circle::{self, CircleIntervalSet};
use dsx_core::harness;
use dsx_core::overlap::{self, OverlapRecord, PairDecomposition};
use dsx_core::real::DEFAULT_PRECISION;
use dsx_core::schedule::{self, PsiFunction};
use dsx_core::Error;

create_exception!(dsx, DsxError, PyValueError, "Base class for dsx errors.");
create_exception!(
    dsx,
    ConfigError,
    DsxError,
    "Invalid configuration or input."
);
create_exception!(
    dsx,
    UndefinedRatioError,
    DsxError,
    "A ratio with zero denominator."
);
create_exception!(dsx, PrecisionError, DsxError, "Precision guard abort.");
create_exception!(dsx, CapError, DsxError, "Input exceeds a size cap.");

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::UndefinedRatio(_) => UndefinedRatioError::new_err(msg),
        Error::Precision(_) => PrecisionError::new_err(msg),
        Error::Cap(_) | Error::Range(_) => CapError::new_err(msg),
        Error::Domain(_) | Error::Config(_) | Error::Json(_) => ConfigError::new_err(msg),
        Error::Io(_) | Error::Csv(_) => DsxError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for dsx_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Prime factorization `[(p, e), …]` and `φ(n)`.
#[pyfunction]
fn factor_phi(n: u64) -> PyResult<(Vec<(u64, u32)>, u64)> {
    let (f, phi) = arith::factor_phi(n).py_err()?;
    Ok((f.factors().to_vec(), phi))
}

/// The rational stand-in `ê_k` for `e^k`.
#[pyfunction]
fn exp_rational(k: u64) -> Rational {
    arith::exp_rational(k)
}

/// `Σ_{b ≤ x, (b, t) = 1} 1/b`.
#[pyfunction]
fn coprime_harmonic(t: u64, x: Rational) -> Rational {
    arith::coprime_harmonic(t, &x)
}

/// A canonical finite union of half-open intervals in `[0, 1)`.
#[pyclass(name = "IntervalSet", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyIntervalSet(CircleIntervalSet);

#[pymethods]
impl PyIntervalSet {
    #[new]
    fn new(intervals: Vec<(Rational, Rational)>) -> PyResult<Self> {
        CircleIntervalSet::from_intervals(&intervals)
            .py_err()
            .map(PyIntervalSet)
    }

    fn measure(&self) -> Rational {
        self.0.measure()
    }

    fn intervals(&self) -> Vec<(Rational, Rational)> {
        self.0.intervals()
    }

    fn intersect(&self, other: &PyIntervalSet) -> PyIntervalSet {
        PyIntervalSet(self.0.intersect(&other.0))
    }

    fn intersection_measure(&self, other: &PyIntervalSet) -> Rational {
        self.0.intersection_measure(&other.0)
    }

    fn contains(&self, x: Rational) -> bool {
        self.0.contains(&x)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "IntervalSet({} intervals, measure {})",
            self.0.len(),
            self.0.measure()
        )
    }
}

/// `E_n` with radius `ρ`: the union of `((a − ρ)/n, (a + ρ)/n)` over units `a` mod `n`.
#[pyfunction]
fn build_e(n: u64, radius: Rational) -> PyResult<PyIntervalSet> {
    circle::build_e(n, &radius).py_err().map(PyIntervalSet)
}

#[pyfunction]
fn union_measure(sets: Vec<PyRef<'_, PyIntervalSet>>) -> Rational {
    let sets: Vec<CircleIntervalSet> = sets.iter().map(|s| s.0.clone()).collect();
    circle::union_measure(&sets)
}

/// A normalized ψ on `1..=n_max`.
#[pyclass(name = "Psi", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPsi(PsiFunction);

#[pymethods]
impl PyPsi {
    /// `spec` is one of `half`, `recip`, `primes:R`, `file:PATH`.
    #[new]
    fn new(spec: &str, n_max: u64) -> PyResult<Self> {
        let psi = PsiFunction::parse(spec, n_max).py_err()?;
        schedule::normalize_psi(&psi).py_err().map(PyPsi)
    }

    /// Table of values `ψ(1), ψ(2), …`; normalized on construction.
    #[staticmethod]
    fn from_values(values: Vec<Rational>) -> PyResult<Self> {
        let psi = PsiFunction::from_values("python", values);
        schedule::normalize_psi(&psi).py_err().map(PyPsi)
    }

    fn __call__(&self, n: u64) -> PyResult<Rational> {
        self.0.value(n).py_err()
    }

    #[getter]
    fn n_max(&self) -> u64 {
        self.0.n_max()
    }

    fn __repr__(&self) -> String {
        format!("Psi({})", self.0)
    }
}

#[pyclass(name = "PairDecomposition", frozen)]
struct PyPair(PairDecomposition);

#[pymethods]
impl PyPair {
    #[getter]
    fn m(&self) -> u64 {
        self.0.m
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }
    #[getter]
    fn r(&self) -> u64 {
        self.0.r
    }
    #[getter]
    fn s(&self) -> u64 {
        self.0.s
    }
    #[getter]
    fn t(&self) -> u64 {
        self.0.t
    }
    #[getter]
    fn g(&self) -> u64 {
        self.0.g
    }
    #[getter]
    fn unequal_primes(&self) -> Vec<u64> {
        self.0.unequal_primes.clone()
    }
    #[getter]
    fn delta(&self) -> Rational {
        self.0.delta.clone()
    }
    #[getter]
    fn big_delta(&self) -> Rational {
        self.0.big_delta.clone()
    }

    /// `D_k`.
    fn scaled_d(&self, k: u64) -> Rational {
        overlap::scaled_d(&self.0, k)
    }

    /// `Π p/(p − 1)` over primes `p | t/s` with `p > D_k`.
    fn pv_bound(&self, k: u64) -> Rational {
        overlap::pv_bound(&self.0, k)
    }

    /// `4Δrt/ê_k`.
    fn window(&self, k: u64) -> Rational {
        overlap::window(&self.0, k)
    }

    fn disjoint_predicted(&self, k: u64) -> bool {
        overlap::disjoint_predicted(&self.0, k)
    }

    fn __repr__(&self) -> String {
        let d = &self.0;
        format!(
            "PairDecomposition(m={}, n={}, r={}, s={}, t={}, g={})",
            d.m, d.n, d.r, d.s, d.t, d.g
        )
    }
}

#[pyfunction]
fn decompose_pair(m: u64, n: u64, psi: &PyPsi) -> PyResult<PyPair> {
    overlap::decompose_pair(m, n, &psi.0).py_err().map(PyPair)
}

/// `P_k(m, n) = λ(E_m^(k) ∩ E_n^(k)) / (λ(E_m^(k)) λ(E_n^(k)))`.
#[pyfunction]
fn exact_p(m: u64, n: u64, psi: &PyPsi, k: u64) -> PyResult<Rational> {
    overlap::exact_p(m, n, &psi.0, k).py_err()
}

fn record_dict<'py>(py: Python<'py>, r: &OverlapRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("m", r.m)?;
    d.set_item("n", r.n)?;
    d.set_item("k", r.k)?;
    d.set_item("r", r.r)?;
    d.set_item("s", r.s)?;
    d.set_item("t", r.t)?;
    d.set_item("g", r.g)?;
    d.set_item("delta", &r.delta)?;
    d.set_item("big_delta", &r.big_delta)?;
    d.set_item("d_k", &r.d_k)?;
    d.set_item("pv_product", &r.pv_product)?;
    d.set_item("p_exact", r.p_defined.then(|| r.p_exact.clone()))?;
    d.set_item(
        "integral_bound",
        r.integral_bound.as_ref().map(|x| x.to_f64()),
    )?;
    d.set_item("disjoint_predicted", r.disjoint_predicted)?;
    d.set_item("threshold_class", r.threshold_class.as_str())?;
    Ok(d)
}

/// One overlap record at scale `k`, as a dict; `p_exact` is `None` when undefined.
#[pyfunction]
#[pyo3(signature = (m, n, psi, k, k_max = None, integral = true))]
fn overlap_record<'py>(
    py: Python<'py>,
    m: u64,
    n: u64,
    psi: &PyPsi,
    k: u64,
    k_max: Option<u64>,
    integral: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let precision = integral.then_some(DEFAULT_PRECISION);
    let rec =
        OverlapRecord::compute(m, n, &psi.0, k, k_max.unwrap_or(k.max(1)), precision).py_err()?;
    record_dict(py, &rec)
}

/// `(Σ_{k ≤ K} P_k, [records])`.
#[pyfunction]
#[allow(non_snake_case)]
fn averaged_sum<'py>(
    py: Python<'py>,
    m: u64,
    n: u64,
    psi: &PyPsi,
    K: u64,
) -> PyResult<(Rational, Vec<Bound<'py, PyDict>>)> {
    let s = overlap::averaged_sum(m, n, &psi.0, K, None).py_err()?;
    let rows = s
        .per_k
        .iter()
        .map(|r| record_dict(py, r))
        .collect::<PyResult<_>>()?;
    Ok((s.total, rows))
}

#[pyfunction]
fn block_bounds(h: u32, base: u32) -> PyResult<(u128, u128)> {
    schedule::block_bounds(h, base).py_err()
}

/// `K(h) = max(1, ⌊ε h ln 4⌋)`.
#[pyfunction]
fn k_of_h(h: u32, epsilon: Rational) -> PyResult<u64> {
    schedule::k_of_h(h, &epsilon).py_err()
}

/// Chooses `k(h)` on one block; returns a dict with the exact per-`k` sums.
#[pyfunction]
#[pyo3(signature = (h, base, psi, epsilon, pairs, seed = None))]
fn select_k<'py>(
    py: Python<'py>,
    h: u32,
    base: u32,
    psi: &PyPsi,
    epsilon: Rational,
    pairs: Vec<(u64, u64)>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let psi = psi.0.clone();
    let rep = py
        .detach(move || schedule::select_k(h, base, &psi, &epsilon, &pairs, seed))
        .py_err()?;
    let d = PyDict::new(py);
    d.set_item("h", rep.h)?;
    d.set_item("base", rep.base)?;
    d.set_item("lo", rep.lo)?;
    d.set_item("hi", rep.hi)?;
    d.set_item("K", rep.k_max)?;
    d.set_item("pair_count", rep.pair_count)?;
    d.set_item("chosen_k", rep.chosen_k)?;
    let sums = rep
        .per_k_sums
        .iter()
        .map(|s| (s.k, s.scaled_overlap.clone(), s.product.clone()))
        .collect::<Vec<_>>();
    d.set_item("per_k_sums", sums)?;
    Ok(d)
}

/// `(Σ λ(E_n))² / Σ_{m,n} λ(E_m ∩ E_n)` over `n ≤ N`.
#[pyfunction]
#[allow(non_snake_case)]
fn bc_ratio(py: Python<'_>, psi: &PyPsi, N: u64) -> PyResult<Rational> {
    let psi = psi.0.clone();
    py.detach(move || harness::bc_ratio(&psi, N))
        .py_err()
        .map(|r| r.ratio)
}

#[pymodule]
fn dsx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DsxError", py.get_type::<DsxError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("UndefinedRatioError", py.get_type::<UndefinedRatioError>())?;
    m.add("PrecisionError", py.get_type::<PrecisionError>())?;
    m.add("CapError", py.get_type::<CapError>())?;
    m.add_class::<PyIntervalSet>()?;
    m.add_class::<PyPsi>()?;
    m.add_class::<PyPair>()?;
    m.add_function(wrap_pyfunction!(factor_phi, m)?)?;
    m.add_function(wrap_pyfunction!(exp_rational, m)?)?;
    m.add_function(wrap_pyfunction!(coprime_harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(build_e, m)?)?;
    m.add_function(wrap_pyfunction!(union_measure, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_pair, m)?)?;
    m.add_function(wrap_pyfunction!(exact_p, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_record, m)?)?;
    m.add_function(wrap_pyfunction!(averaged_sum, m)?)?;
    m.add_function(wrap_pyfunction!(block_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(k_of_h, m)?)?;
    m.add_function(wrap_pyfunction!(select_k, m)?)?;
    m.add_function(wrap_pyfunction!(bc_ratio, m)?)?;
    Ok(())
}
