//! Python bindings for the core routines.

use peierls_core::{finite_chain, kernels, thermodynamic, zero_temperature, Error, ModelParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } | Error::Invalid(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Critical point of the infinite chain as `(theta_c, W_star, x)`.
#[pyfunction]
fn theta_critical_thermo(mu: f64) -> PyResult<(f64, f64, f64)> {
    let c = thermodynamic::theta_critical_thermo(mu).map_err(py_err)?;
    Ok((c.theta_c(), c.w_star(), c.x()))
}

/// Critical point of a ring, or `None` when it never dimerizes.
#[pyfunction]
fn theta_critical_finite(mu: f64, len: usize) -> PyResult<Option<(f64, f64, f64)>> {
    let c = finite_chain::theta_critical_finite(mu, len).map_err(py_err)?;
    Ok(c.map(|c| (c.theta_c(), c.w_star(), c.x())))
}

#[pyfunction]
fn mu_critical(len: usize) -> PyResult<f64> {
    finite_chain::mu_critical(len).map_err(py_err)
}

#[pyfunction]
fn j_finite(x: f64, len: usize) -> PyResult<f64> {
    finite_chain::j_finite(x, len).map_err(py_err)
}

#[pyfunction]
fn j_thermo(x: f64) -> PyResult<f64> {
    thermodynamic::j_thermo(x).map_err(py_err)
}

#[pyfunction]
fn h_theta(x: f64, theta: f64) -> PyResult<f64> {
    kernels::h_theta(x, theta).map_err(py_err)
}

#[pyfunction]
fn g_thermo(w: f64, delta: f64, mu: f64, theta: f64) -> PyResult<f64> {
    let p = ModelParams::infinite(mu, theta).map_err(py_err)?;
    thermodynamic::g_thermo_raw(w, delta, &p).map_err(py_err)
}

#[pyfunction]
fn g_finite(w: f64, delta: f64, mu: f64, theta: f64, len: usize) -> PyResult<f64> {
    let p = ModelParams::ring(mu, theta, len).map_err(py_err)?;
    finite_chain::g_finite_raw(w, delta, &p).map_err(py_err)
}

#[pyfunction]
fn g_zero(w: f64, delta: f64, mu: f64) -> PyResult<f64> {
    zero_temperature::g_zero_raw(w, delta, mu).map_err(py_err)
}

/// Minimizing dimer state `(W, delta, energy)`; a ring when `len` is given.
#[pyfunction]
#[pyo3(signature = (mu, theta, len=None))]
fn minimize_dimer(mu: f64, theta: f64, len: Option<usize>) -> PyResult<(f64, f64, f64)> {
    let p = ModelParams::new(mu, theta, len).map_err(py_err)?;
    let (s, e) = match len {
        Some(_) => finite_chain::minimize_dimer_finite(&p),
        None => thermodynamic::minimize_dimer_thermo(&p),
    }
    .map_err(py_err)?;
    Ok((s.w(), s.delta(), e))
}

#[pyfunction]
fn periodic_optimum_zero(mu: f64) -> PyResult<(f64, f64)> {
    zero_temperature::periodic_optimum_zero(mu).map_err(py_err)
}

#[pyfunction]
fn dimer_optimum_zero(py: Python<'_>, mu: f64) -> PyResult<Bound<'_, PyDict>> {
    let g = zero_temperature::dimer_optimum_zero(mu).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("mu", g.mu)?;
    d.set_item("W1", g.w1)?;
    d.set_item("f0_per", g.f0_per)?;
    d.set_item("f0", g.f0)?;
    d.set_item("gap", g.gap)?;
    d.set_item("W_opt", g.w_opt)?;
    d.set_item("delta_opt", g.delta_opt)?;
    d.set_item("resolved", g.resolved)?;
    Ok(d)
}

#[pyfunction]
fn asymptotic_constants(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let c = thermodynamic::asymptotic_constants().map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("c1", c.c1)?;
    d.set_item("c2", c.c2)?;
    d.set_item("C", c.c_prefactor)?;
    Ok(d)
}

#[pyfunction]
fn bifurcation_data(py: Python<'_>, mu: f64) -> PyResult<Bound<'_, PyDict>> {
    let b = thermodynamic::bifurcation_data(mu).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("mu", b.mu)?;
    d.set_item("theta_c", b.theta_c)?;
    d.set_item("W_star", b.w_star)?;
    d.set_item("A", b.a)?;
    d.set_item("B", b.b)?;
    d.set_item("C", b.c_int)?;
    d.set_item("det_j", b.det_j)?;
    d.set_item("delta_prime", b.delta_prime)?;
    d.set_item("coeff", b.coeff)?;
    Ok(d)
}

#[pymodule]
fn peierls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(theta_critical_thermo, m)?)?;
    m.add_function(wrap_pyfunction!(theta_critical_finite, m)?)?;
    m.add_function(wrap_pyfunction!(mu_critical, m)?)?;
    m.add_function(wrap_pyfunction!(j_finite, m)?)?;
    m.add_function(wrap_pyfunction!(j_thermo, m)?)?;
    m.add_function(wrap_pyfunction!(h_theta, m)?)?;
    m.add_function(wrap_pyfunction!(g_thermo, m)?)?;
    m.add_function(wrap_pyfunction!(g_finite, m)?)?;
    m.add_function(wrap_pyfunction!(g_zero, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_dimer, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_optimum_zero, m)?)?;
    m.add_function(wrap_pyfunction!(dimer_optimum_zero, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_constants, m)?)?;
    m.add_function(wrap_pyfunction!(bifurcation_data, m)?)?;
    Ok(())
}
