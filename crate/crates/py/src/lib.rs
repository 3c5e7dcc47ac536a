//! Python bindings: tuples, primality, the covering construction, and the
//! scanners, driven in-process. Complex reports cross the boundary as
//! JSON strings; everything else maps to native Python types (big
//! integers included).

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use polignac::construction;
use polignac::error::Error;
use polignac::primes;
use polignac::scan;
use polignac::tuples;

fn to_py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One hit on the Python side: (n, prime_mask, adjacent_pairs).
type ScanHit = (u64, Vec<bool>, Vec<(usize, usize)>);

/// A strictly increasing set of non-negative integers.
#[pyclass(name = "Tuple", skip_from_py_object)]
#[derive(Clone)]
struct PyTuple_ {
    inner: tuples::Tuple,
}

#[pymethods]
impl PyTuple_ {
    /// Build from a list of elements (any order, duplicates rejected).
    #[new]
    fn new(elements: Vec<u64>) -> PyResult<Self> {
        Ok(PyTuple_ {
            inner: tuples::Tuple::new(elements).map_err(to_py_err)?,
        })
    }

    /// Parse the text format: integers split on whitespace/commas, `#` comments.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyTuple_ {
            inner: tuples::Tuple::parse_text(text).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn elements(&self) -> Vec<u64> {
        self.inner.elements().to_vec()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn diameter(&self) -> u64 {
        self.inner.diameter()
    }

    /// Admissibility verdict with evidence, as a dict.
    fn is_admissible<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = tuples::is_admissible(&self.inner);
        let d = PyDict::new(py);
        d.set_item("admissible", report.admissible)?;
        d.set_item("checked_prime_bound", report.checked_prime_bound)?;
        match report.failure {
            Some(f) => {
                let fd = PyDict::new(py);
                fd.set_item("prime", f.prime)?;
                fd.set_item("residue_count", f.residue_count)?;
                d.set_item("failure", fd)?;
            }
            None => d.set_item("failure", py.None())?,
        }
        Ok(d)
    }

    /// Deduplicated pairwise differences scaled by m.
    #[pyo3(signature = (m = 1))]
    fn diff_set(&self, m: u64) -> PyResult<Vec<u64>> {
        Ok(tuples::scaled_diff_set(&self.inner, m)
            .map_err(to_py_err)?
            .values()
            .to_vec())
    }

    /// Distinct residue classes occupied mod a prime p.
    fn residue_count(&self, p: u64) -> PyResult<u64> {
        tuples::residue_count(&self.inner, p).map_err(to_py_err)
    }

    /// The tuple {b + q*h_i}.
    fn translate_scale(&self, b: u64, q: u64) -> PyResult<PyTuple_> {
        Ok(PyTuple_ {
            inner: tuples::translate_scale(&self.inner, b, q).map_err(to_py_err)?,
        })
    }

    /// Truncated log-space singular-series sum.
    #[pyo3(signature = (prime_bound, q = 1))]
    fn singular_series_log(&self, prime_bound: u64, q: u64) -> PyResult<f64> {
        tuples::singular_series_log(&self.inner, q, prime_bound).map_err(to_py_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Tuple([{}])", self.inner.to_string().replace(' ', ", "))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &PyTuple_) -> bool {
        self.inner == other.inner
    }
}

/// The covering-construction bundle (H, m, X, cover primes, b, q).
#[pyclass(name = "Construction", skip_from_py_object)]
#[derive(Clone)]
struct PyConstruction {
    inner: construction::PolignacConstruction,
}

#[pymethods]
impl PyConstruction {
    /// Run the whole construction for an admissible tuple and multiplier.
    #[new]
    #[pyo3(signature = (tuple, m = 1))]
    fn new(tuple: &PyTuple_, m: u64) -> PyResult<Self> {
        Ok(PyConstruction {
            inner: construction::assemble(&tuple.inner, m).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyConstruction {
            inner: construction::PolignacConstruction::from_json(text).map_err(to_py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn tuple(&self) -> PyTuple_ {
        PyTuple_ {
            inner: self.inner.tuple.clone(),
        }
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.m
    }

    #[getter]
    fn exceptions(&self) -> Vec<u64> {
        self.inner.exceptions.clone()
    }

    #[getter]
    fn cover_primes(&self) -> Vec<u64> {
        self.inner.cover_primes.clone()
    }

    #[getter]
    fn b(&self) -> BigUint {
        self.inner.b.clone()
    }

    #[getter]
    fn q(&self) -> BigUint {
        self.inner.q.clone()
    }

    /// Re-run all six checks; list of (name, passed, detail) triples.
    fn verify(&self) -> Vec<(String, bool, String)> {
        construction::verify(&self.inner)
            .checks
            .into_iter()
            .map(|c| (c.name.to_string(), c.passed, c.detail))
            .collect()
    }

    fn verify_passed(&self) -> bool {
        construction::verify(&self.inner).passed()
    }

    /// Does p_j divide q*n + b + a_j for all j and all n <= n_max?
    fn cover_divisibility_check(&self, n_max: u64) -> bool {
        scan::cover_divisibility_check(&self.inner, n_max)
    }

    /// Scan [n_lo, n_hi) and return the full report as a JSON string.
    #[pyo3(signature = (n_lo, n_hi, workers = 1, witness_cap = scan::DEFAULT_WITNESS_CAP))]
    fn scan_json(
        &self,
        n_lo: u64,
        n_hi: u64,
        workers: usize,
        witness_cap: usize,
    ) -> PyResult<String> {
        Ok(
            scan::run_scan(&self.inner, n_lo, n_hi, workers, witness_cap)
                .map_err(to_py_err)?
                .to_json(),
        )
    }

    /// Scan [n_lo, n_hi) and return hits as (n, prime_mask, adjacent_pairs).
    #[pyo3(signature = (n_lo, n_hi, workers = 1))]
    fn scan(&self, n_lo: u64, n_hi: u64, workers: usize) -> PyResult<Vec<ScanHit>> {
        Ok(scan::scan_tuple(&self.inner, n_lo, n_hi, workers)
            .map_err(to_py_err)?
            .into_iter()
            .map(|hit| (hit.n, hit.prime_mask, hit.adjacent_pairs))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Construction(H=[{}], m={}, q={})",
            self.inner.tuple.to_string().replace(' ', ", "),
            self.inner.m,
            self.inner.q
        )
    }
}

/// Exact below 2^64; Baillie-PSW (probable prime) above.
#[pyfunction]
fn is_prime(n: BigUint) -> bool {
    primes::is_prime(&n)
}

/// "composite", "prime", or "probable_prime" (the latter only at or above 2^64).
#[pyfunction]
fn classify_prime(n: BigUint) -> &'static str {
    match primes::classify(&n) {
        primes::Primality::Composite => "composite",
        primes::Primality::Prime => "prime",
        primes::Primality::ProbablePrime => "probable_prime",
    }
}

#[pyfunction]
fn next_prime_above(n: BigUint) -> BigUint {
    primes::next_prime_above(&n)
}

/// All primes p <= limit with p ≡ b (mod q); requires gcd(b, q) = 1.
#[pyfunction]
fn primes_in_ap(b: u64, q: u64, limit: u64) -> PyResult<Vec<u64>> {
    primes::primes_in_ap(b, q, limit).map_err(to_py_err)
}

/// The canonical admissible tuple from the first k primes past k.
#[pyfunction]
fn gen_tuple(k: u64) -> PyResult<PyTuple_> {
    Ok(PyTuple_ {
        inner: tuples::gen_tuple_primes_past_k(k).map_err(to_py_err)?,
    })
}

/// True iff no prime lies strictly between p and p_next.
#[pyfunction]
fn verify_consecutive(p: BigUint, p_next: BigUint) -> PyResult<bool> {
    scan::verify_consecutive(&p, &p_next).map_err(to_py_err)
}

/// Normalized gap statistics within one arithmetic progression; returns
/// {"min_normalized_gap", "prime_count", "histogram"}.
#[pyfunction]
fn ap_gap_scan<'py>(py: Python<'py>, b: u64, q: u64, limit: u64) -> PyResult<Bound<'py, PyDict>> {
    let result = scan::ap_gap_scan(b, q, limit).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("b", result.b)?;
    d.set_item("q", result.q)?;
    d.set_item("limit", result.limit)?;
    d.set_item("prime_count", result.prime_count)?;
    d.set_item("min_normalized_gap", result.min_normalized_gap)?;
    d.set_item("histogram", result.histogram)?;
    Ok(d)
}

#[pymodule]
fn polignac_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTuple_>()?;
    m.add_class::<PyConstruction>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(classify_prime, m)?)?;
    m.add_function(wrap_pyfunction!(next_prime_above, m)?)?;
    m.add_function(wrap_pyfunction!(primes_in_ap, m)?)?;
    m.add_function(wrap_pyfunction!(gen_tuple, m)?)?;
    m.add_function(wrap_pyfunction!(verify_consecutive, m)?)?;
    m.add_function(wrap_pyfunction!(ap_gap_scan, m)?)?;
    Ok(())
}
