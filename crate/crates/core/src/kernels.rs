//! Scalar kernels of the model.
//!
//! `h(y) = 2 ln(2 cosh √y)` and its scaled form `h_θ(x) = θ h(x / 4θ²)` give
//! the electronic free energy of one mode as a function of its squared
//! energy; `h_θ` is positive, increasing and concave and tends to `√x` as
//! `θ → 0`.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_adaptive, Tolerance};

/// Below this argument `h′` and `h″` come from their Taylor series.
pub const SERIES_CROSSOVER: f64 = 1e-6;

/// `h`, `h′`, `h″` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HKernelValue {
    pub y: f64,
    pub h: f64,
    pub h_prime: f64,
    pub h_second: f64,
}

/// `ln(2 cosh u)`, overflow-free.
pub fn ln_2cosh(u: f64) -> f64 {
    let u = u.abs();
    u + (-2.0 * u).exp().ln_1p()
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy `x ln x + (1 − x) ln(1 − x)` of an occupation `x ∈ [0, 1]`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("occupation", x, "0 <= x <= 1"));
    }
    Ok(xlnx(x) + xlnx(1.0 - x))
}

pub(crate) fn h_value(y: f64) -> f64 {
    2.0 * ln_2cosh(y.sqrt())
}

/// `h′(y) = tanh(√y)/√y`, with `h′(0) = 1`.
pub(crate) fn h_prime(y: f64) -> f64 {
    if y < SERIES_CROSSOVER {
        1.0 - y / 3.0 + 2.0 * y * y / 15.0
    } else {
        let u = y.sqrt();
        u.tanh() / u
    }
}

// (sinh z − z)/z³ for |z| < 1
fn sinh_remainder(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = 1.0 / 6.0;
    let mut sum = term;
    let mut k = 0.0;
    while term > 1e-18 * sum {
        k += 1.0;
        term *= z2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
    }
    sum
}

/// `h″(y) = sech²(√y)/(2y) − tanh(√y)/(2y^{3/2})`, with `h″(0) = −1/3`.
pub(crate) fn h_second(y: f64) -> f64 {
    if y < SERIES_CROSSOVER {
        return -1.0 / 3.0 + 4.0 * y / 15.0 - 17.0 * y * y / 105.0;
    }
    let u = y.sqrt();
    if u < 0.5 {
        // u sech²u − tanh u = −(sinh 2u − 2u)/(2cosh²u), free of cancellation
        let c = u.cosh();
        -2.0 * sinh_remainder(2.0 * u) / (c * c)
    } else {
        let sech = 1.0 / u.cosh();
        (u * sech * sech - u.tanh()) / (2.0 * u * u * u)
    }
}

/// Evaluates `h`, `h′` and `h″` at `y ≥ 0`.
pub fn h_eval(y: f64) -> Result<HKernelValue> {
    if !(y >= 0.0) || y.is_infinite() {
        return Err(domain("y", y, "finite y >= 0"));
    }
    Ok(HKernelValue {
        y,
        h: h_value(y),
        h_prime: h_prime(y),
        h_second: h_second(y),
    })
}

pub(crate) fn h_theta_unchecked(x: f64, theta: f64) -> f64 {
    theta * h_value(x / (4.0 * theta * theta))
}

/// `h_θ(x) = θ h(x / 4θ²) = 2θ ln(2 cosh(√x / 2θ))` for `θ > 0`.
pub fn h_theta(x: f64, theta: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x, "x >= 0"));
    }
    if !(theta > 0.0) {
        return Err(domain(
            "theta",
            theta,
            "theta > 0 (use the zero-temperature model at 0)",
        ));
    }
    Ok(h_theta_unchecked(x, theta))
}

/// Electronic free energy of a one-body spectrum at temperature `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronFreeEnergy {
    /// `Σε − Σ h_θ(ε²)`; the `Σε` term vanishes for ring hopping matrices.
    pub value: f64,
    /// `2 Σ {ε γ + θ S(γ)}` at the Fermi–Dirac occupations.
    pub fermi_dirac_value: f64,
    /// `γ = 1 / (1 + e^{ε/θ})`, in the order of the input spectrum.
    pub occupations: Vec<f64>,
}

// (γ, 1 − γ) for γ = 1/(1 + e^z), each computed without cancellation
fn fermi_pair(z: f64) -> (f64, f64) {
    if z > 0.0 {
        let e = (-z).exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = z.exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    }
}

/// `2 Σ {ε_i γ_i + θ S(γ_i)}` for arbitrary occupations in `[0, 1]`.
pub fn occupation_objective(eigs: &[f64], occupations: &[f64], theta: f64) -> Result<f64> {
    if eigs.len() != occupations.len() {
        return Err(Error::Invalid(format!(
            "{} eigenvalues but {} occupations",
            eigs.len(),
            occupations.len()
        )));
    }
    let mut total = 0.0;
    for (&e, &g) in eigs.iter().zip(occupations) {
        total += e * g + theta * entropy(g)?;
    }
    Ok(2.0 * total)
}

/// Minimizes `2 Tr(Tγ) + 2θ Tr S(γ)` over occupations for the spectrum `eigs`.
///
/// The closed form `Σε − Σ h_θ(ε²)` is returned in `value`; the direct sum
/// at the Fermi–Dirac occupations is kept alongside and the two are required
/// to agree within `1e-10` (relative to the spectrum scale).
pub fn electron_free_energy(eigs: &[f64], theta: f64) -> Result<ElectronFreeEnergy> {
    if !(theta > 0.0) {
        return Err(domain("theta", theta, "theta > 0"));
    }
    if let Some(&bad) = eigs.iter().find(|e| !e.is_finite()) {
        return Err(domain("eigenvalue", bad, "finite"));
    }
    let mut occupations = Vec::with_capacity(eigs.len());
    let mut direct = 0.0;
    let mut closed = 0.0;
    let mut scale = 1.0;
    for &e in eigs {
        let (g, one_minus_g) = fermi_pair(e / theta);
        occupations.push(g);
        direct += e * g + theta * (xlnx(g) + xlnx(one_minus_g));
        closed += e - h_theta_unchecked(e * e, theta);
        scale += e.abs();
    }
    direct *= 2.0;
    if (direct - closed).abs() > 1e-10 * scale {
        return Err(Error::Consistency(format!(
            "Fermi–Dirac sum {direct} differs from closed form {closed}"
        )));
    }
    Ok(ElectronFreeEnergy {
        value: closed,
        fermi_dirac_value: direct,
        occupations,
    })
}

/// `∫₀¹ √(1 + a u²/(1 − u²)) du`, i.e. the complete elliptic integral of the
/// second kind `E(1 − a)`, for `a ∈ [0, 1]`.
///
/// Evaluated after `u = sin φ` as `∫₀^{π/2} √(cos²φ + a sin²φ) dφ`, which has
/// no endpoint singularity.
pub fn elliptic_side(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(domain("a", a, "0 <= a <= 1"));
    }
    let tol = Tolerance::new(1e-15, 1e-14, 4000)?;
    Ok(integrate_adaptive(
        |phi: f64| {
            let (s, c) = phi.sin_cos();
            (c * c + a * s * s).sqrt()
        },
        0.0,
        FRAC_PI_2,
        &tol,
    )?)
}

/// Upper bound `h_θ(x) − √x ≤ 2θ ln 2`.
pub fn h_theta_excess_bound(theta: f64) -> f64 {
    2.0 * theta * LN_2
}
