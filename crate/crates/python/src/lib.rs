//! Python bindings: `import pydeldec`.
//!
//! Bit sequences can be passed as `BitSeq`, a `"0101"` string, or a list of 0/1 ints.

use deldec::codec::DecodePath;
use deldec::oracle::{self, MessageSet, VerificationReport};
use deldec::syndrome::SyndromeRecord;
use deldec::{BitSeq, DecodeOptions, Error, SyndromeF, SyndromeH};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIndexError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pydeldec, DecodeError, PyException, "Decoding could not recover a unique sequence.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) => PyValueError::new_err(e.to_string()),
        _ => DecodeError::new_err(e.to_string()),
    }
}

/// Immutable binary sequence.
#[pyclass(name = "BitSeq", module = "pydeldec", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyBitSeq(BitSeq);

#[pymethods]
impl PyBitSeq {
    #[new]
    fn py_new(bits: &Bound<'_, PyAny>) -> PyResult<Self> {
        to_bits(bits).map(PyBitSeq)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __getitem__(&self, idx: isize) -> PyResult<u8> {
        let len = self.0.len() as isize;
        let k = if idx < 0 { idx + len } else { idx };
        if !(0..len).contains(&k) {
            return Err(PyIndexError::new_err("bit index out of range"));
        }
        Ok(self.0.as_slice()[k as usize])
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BitSeq('{}')", self.0)
    }

    fn to_list(&self) -> Vec<u8> {
        self.0.as_slice().to_vec()
    }

    /// Copy with the given 1-based positions removed.
    fn delete(&self, positions: Vec<usize>) -> PyResult<Self> {
        deldec::bitseq::delete_at(&self.0, &positions).map(PyBitSeq).map_err(py_err)
    }
}

fn to_bits(obj: &Bound<'_, PyAny>) -> PyResult<BitSeq> {
    if let Ok(b) = obj.cast::<PyBitSeq>() {
        return Ok(b.get().0.clone());
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(py_err);
    }
    if let Ok(v) = obj.extract::<Vec<u8>>() {
        return BitSeq::new(v).map_err(py_err);
    }
    Err(PyTypeError::new_err("expected BitSeq, str of 0/1, or list of 0/1 ints"))
}

/// Outcome of a verification sweep.
#[pyclass(name = "Report", module = "pydeldec", frozen, get_all)]
struct PyReport {
    scope: String,
    cases_checked: u64,
    failures: u64,
    passed: bool,
    counterexamples: Vec<(String, Vec<String>)>,
    summary: String,
}

#[pymethods]
impl PyReport {
    fn __str__(&self) -> String {
        self.summary.clone()
    }

    fn __bool__(&self) -> bool {
        self.passed
    }
}

impl From<VerificationReport> for PyReport {
    fn from(r: VerificationReport) -> Self {
        PyReport {
            summary: r.to_string(),
            passed: r.passed(),
            scope: r.scope,
            cases_checked: r.cases_checked,
            failures: r.failures,
            counterexamples: r.counterexamples.into_iter().map(|c| (c.note, c.inputs)).collect(),
        }
    }
}

/// Codeword for a message of at least 8 bits.
#[pyfunction]
fn encode(message: &Bound<'_, PyAny>) -> PyResult<PyBitSeq> {
    deldec::encode(&to_bits(message)?).map(PyBitSeq).map_err(py_err)
}

/// Message of length `n` from a codeword that lost at most two bits.
#[pyfunction]
#[pyo3(signature = (received, n, force_general_path = false))]
fn decode(received: &Bound<'_, PyAny>, n: usize, force_general_path: bool) -> PyResult<PyBitSeq> {
    let opts = DecodeOptions { force_general_path, trace: false };
    deldec::decode_with(&to_bits(received)?, n, opts).map(|r| PyBitSeq(r.message)).map_err(py_err)
}

/// Like `decode`, returning a dict with the message and decoder diagnostics.
#[pyfunction]
#[pyo3(signature = (received, n, force_general_path = false))]
fn decode_report<'py>(
    py: Python<'py>,
    received: &Bound<'py, PyAny>,
    n: usize,
    force_general_path: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = DecodeOptions { force_general_path, trace: false };
    let r = deldec::decode_with(&to_bits(received)?, n, opts).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("message", PyBitSeq(r.message))?;
    let path = match r.path {
        DecodePath::EarlyReturn => "early-return",
        DecodePath::General => "general",
    };
    out.set_item("path", path)?;
    out.set_item("suffix_len", r.suffix_len)?;
    let dg = &r.diagnostics;
    out.set_item("trimmed", dg.trimmed)?;
    out.set_item("layer1_visited", dg.layer1_visited)?;
    out.set_item("message_visited", dg.message_visited)?;
    Ok(out)
}

/// `(f, h)` syndromes of a sequence.
#[pyfunction]
fn syndromes(seq: &Bound<'_, PyAny>) -> PyResult<([u64; 3], [u64; 2])> {
    let rec = SyndromeRecord::of(&to_bits(seq)?).map_err(py_err)?;
    Ok((rec.f, rec.h))
}

fn syndrome_pair(m: usize, f: [u64; 3], h: [u64; 2]) -> PyResult<(SyndromeF, SyndromeH)> {
    Ok((SyndromeF::new(m, f).map_err(py_err)?, SyndromeH::new(m, h).map_err(py_err)?))
}

/// Length-`len(received)+2` sequence with syndromes `f`, `h`.
#[pyfunction]
fn decode_two_deletions(received: &Bound<'_, PyAny>, f: [u64; 3], h: [u64; 2]) -> PyResult<PyBitSeq> {
    let d = to_bits(received)?;
    let (f, h) = syndrome_pair(d.len() + 2, f, h)?;
    deldec::decode_two_deletions(&d, &f, &h).map(PyBitSeq).map_err(py_err)
}

/// Exhaustive-search reference for `decode_two_deletions` (short sequences only).
#[pyfunction]
fn brute_decode(received: &Bound<'_, PyAny>, f: [u64; 3], h: [u64; 2]) -> PyResult<PyBitSeq> {
    let d = to_bits(received)?;
    let m = d.len() + 2;
    let (f, h) = syndrome_pair(m, f, h)?;
    oracle::brute_decode(&d, &f, &h, m).map(PyBitSeq).map_err(py_err)
}

/// Codeword layout for message length `n`.
#[pyfunction]
fn layout(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyDict>> {
    let lay = deldec::layout(n).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("n", lay.n)?;
    out.set_item("N1", lay.n1)?;
    out.set_item("N2", lay.n2)?;
    out.set_item("N", lay.total)?;
    out.set_item("redundancy", lay.redundancy())?;
    Ok(out)
}

/// Checks that no two length-`n` sequences with equal syndromes share a
/// length-`n-2` subsequence.
#[pyfunction]
fn verify_theorem_main(py: Python<'_>, n: usize) -> PyResult<PyReport> {
    py.detach(|| oracle::verify_theorem_main(n)).map(PyReport::from).map_err(py_err)
}

/// Encode, delete every pair of positions, decode. `count=None` sweeps all messages.
#[pyfunction]
#[pyo3(signature = (n, count = None, seed = oracle::DEFAULT_SEED, force_general_path = false))]
fn verify_roundtrip(
    py: Python<'_>,
    n: usize,
    count: Option<usize>,
    seed: u64,
    force_general_path: bool,
) -> PyResult<PyReport> {
    let set = match count {
        Some(count) => MessageSet::Random { count, seed },
        None => MessageSet::All,
    };
    let opts = DecodeOptions { force_general_path, trace: false };
    py.detach(|| oracle::verify_roundtrip(n, set, opts)).map(PyReport::from).map_err(py_err)
}

#[pymodule]
fn pydeldec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBitSeq>()?;
    m.add_class::<PyReport>()?;
    m.add("DecodeError", m.py().get_type::<DecodeError>())?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(decode_report, m)?)?;
    m.add_function(wrap_pyfunction!(syndromes, m)?)?;
    m.add_function(wrap_pyfunction!(decode_two_deletions, m)?)?;
    m.add_function(wrap_pyfunction!(brute_decode, m)?)?;
    m.add_function(wrap_pyfunction!(layout, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem_main, m)?)?;
    m.add_function(wrap_pyfunction!(verify_roundtrip, m)?)?;
    Ok(())
}
