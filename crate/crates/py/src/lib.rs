//! Python bindings. Exact values cross the boundary as `"p/q"` strings.

#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fockzeta::fock::{self, Partition};
use fockzeta::regularized;
use fockzeta::suite::{self, RunConfig, CATALOG};
use fockzeta::voa;
use fockzeta::FockVector;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector_from_terms(terms: Vec<(Vec<u32>, String)>) -> PyResult<FockVector> {
    let mut v = FockVector::zero();
    for (parts, c) in terms {
        let p = Partition::new(parts).ok_or_else(|| value_error("parts must be positive"))?;
        v.add_term(p, &c.parse().map_err(value_error)?);
    }
    Ok(v)
}

fn vector_to_terms(v: &FockVector) -> Vec<(Vec<u32>, String)> {
    v.terms().map(|(p, c)| (p.parts().to_vec(), c.to_string())).collect()
}

/// `B_k` as an exact string.
#[pyfunction]
fn bernoulli(k: usize) -> String {
    regularized::bernoulli(k).to_string()
}

/// `zeta(1 - k)` for `k >= 2`.
#[pyfunction]
fn zeta_neg(k: u32) -> PyResult<String> {
    regularized::zeta_neg(k).map(|z| z.to_string()).map_err(value_error)
}

#[pyfunction]
fn graded_dim(n: u32) -> u64 {
    fock::graded_dim(n)
}

/// The scalar part of `[Lbar^(r)(m), Lbar^(s)(-m)]`.
#[pyfunction]
#[pyo3(signature = (r, s, m, weight_cap=None))]
fn central_term(r: u32, s: u32, m: i64, weight_cap: Option<u32>) -> PyResult<String> {
    let w = weight_cap.unwrap_or_else(|| regularized::default_central_weight(r, s));
    regularized::central_term(r, s, m, w).map(|c| c.lambda.to_string()).map_err(value_error)
}

/// `u_n v` for vectors given as lists of `(parts, coefficient)`.
#[pyfunction]
fn vertex_mode(u: Vec<(Vec<u32>, String)>, n: i64, v: Vec<(Vec<u32>, String)>) -> PyResult<Vec<(Vec<u32>, String)>> {
    let out = voa::vertex_mode(&vector_from_terms(u)?, n, &vector_from_terms(v)?);
    Ok(vector_to_terms(&out))
}

#[pyfunction]
fn catalog() -> Vec<&'static str> {
    CATALOG.to_vec()
}

/// Run checks and return their json-lines reports.
#[pyfunction]
#[pyo3(signature = (selection, weight_cap=None, x_window=None, y_orders=None, mode_range=None, seed=None))]
fn verify(
    selection: &str,
    weight_cap: Option<u32>,
    x_window: Option<i64>,
    y_orders: Option<Vec<i64>>,
    mode_range: Option<i64>,
    seed: Option<u64>,
) -> PyResult<Vec<String>> {
    let mut cfg = RunConfig::default();
    cfg.set("suite", selection).map_err(value_error)?;
    let mut set = |k: &str, v: Option<String>| match v {
        Some(v) => cfg.set(k, &v).map_err(value_error),
        None => Ok(()),
    };
    set("weight-cap", weight_cap.map(|x| x.to_string()))?;
    set("x-window", x_window.map(|x| x.to_string()))?;
    set("mode-range", mode_range.map(|x| x.to_string()))?;
    set("seed", seed.map(|x| x.to_string()))?;
    set("y-order", y_orders.map(|o| o.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))?;
    Ok(suite::run_suite(&cfg).iter().map(|r| r.to_json_line()).collect())
}

#[pymodule]
pub fn fockzeta_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_neg, m)?)?;
    m.add_function(wrap_pyfunction!(graded_dim, m)?)?;
    m.add_function(wrap_pyfunction!(central_term, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_mode, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
