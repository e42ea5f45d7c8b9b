//! The infinite chain.
//!
//! Ring averages become `(2/π)∫₀^{π/2}`; the critical temperature solves the
//! continuum Euler–Lagrange system and the amplitude bifurcates like
//! `δ ≈ coeff·√(θ_c − θ)` just below it.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rayon::prelude::*;

use crate::dimer::{DimerFunctional, DimerState, Kernel, Measure};
use crate::error::{domain, Error, Result};
use crate::finite_chain::{invert_increasing, root_tolerance, CriticalPoint, ModelParams};
use crate::kernels::{h_prime, h_second};
use crate::numerics::{integrate_adaptive, Tolerance};

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-13, 4000).expect("static tolerance is valid")
}

// (4/π)∫₀^{π/2} f
fn quarter_mean<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    Ok(4.0 / PI * integrate_adaptive(f, 0.0, FRAC_PI_2, &quad_tol())?)
}

fn thermo_functional(p: &ModelParams) -> Result<DimerFunctional> {
    let theta = p.require_thermal()?;
    DimerFunctional::new(p.mu(), Kernel::Thermal(theta), Measure::Continuum)
}

/// `(μ/2)[(W−1)² + δ²] − (1/2π)∫₀^{2π} h_θ(4W²cos²s + 4δ²sin²s) ds`.
pub fn g_thermo(s: &DimerState, p: &ModelParams) -> Result<f64> {
    g_thermo_raw(s.w(), s.delta(), p)
}

/// [`g_thermo`] for any `W, δ ≥ 0`.
pub fn g_thermo_raw(w: f64, delta: f64, p: &ModelParams) -> Result<f64> {
    thermo_functional(p)?.value(w, delta)
}

/// Minimizes [`g_thermo`]; amplitudes below `1e-8` are reported as 0.
pub fn minimize_dimer_thermo(p: &ModelParams) -> Result<(DimerState, f64)> {
    thermo_functional(p)?.minimize(&[])
}

// tanh(x c)/c with the c → 0 limit
fn tanh_over(x: f64, c: f64) -> f64 {
    let z = x * c;
    if z < 1e-6 {
        x * (1.0 - z * z / 3.0)
    } else {
        z.tanh() / c
    }
}

/// `−(4/π)∫₀^{π/2} tanh(x cos s)·cos(2s)/cos(s) ds`, increasing from 0 to ∞.
pub fn j_thermo(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("x", x, "finite x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(-quarter_mean(|s: f64| {
        tanh_over(x, s.cos()) * (2.0 * s).cos()
    })?)
}

/// Critical temperature of the infinite chain.
pub fn theta_critical_thermo(mu: f64) -> Result<CriticalPoint> {
    theta_critical_thermo_with(mu, &root_tolerance())
}

/// [`theta_critical_thermo`] with an explicit root-solver tolerance.
///
/// `x = J⁻¹(μ)`; `θ_c` follows from `μ(xθ − 1) = (4/π)∫tanh(x cos s)cos s`
/// and the companion equation `μW = (4/π)∫tanh(x cos s)sin²s/cos s` is
/// checked to `1e-8`.
pub fn theta_critical_thermo_with(mu: f64, tol: &Tolerance) -> Result<CriticalPoint> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain("mu", mu, "finite mu > 0"));
    }
    let x = invert_increasing(|x| j_thermo(x).unwrap_or(f64::NAN), mu, mu.max(1.0), tol)?;
    let cos_part = quarter_mean(|s: f64| (x * s.cos()).tanh() * s.cos())?;
    let theta = (mu + cos_part) / (mu * x);
    let sin_part = quarter_mean(|s: f64| {
        let (sn, c) = s.sin_cos();
        tanh_over(x, c) * sn * sn
    })?;
    let residual = mu * x * theta - sin_part;
    if residual.abs() > 1e-8 * (1.0 + sin_part.abs()) {
        return Err(Error::Consistency(format!(
            "second stationarity equation off by {residual:e} at x = {x}"
        )));
    }
    CriticalPoint::new(x, theta)
}

/// Large-stiffness constants of `θ_c(μ) ≈ C e^{−πμ/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    /// `∫₀¹ tanh(u)/u du + ∫₁^∞ (tanh(u) − 1)/u du`
    pub c1: f64,
    /// `c1 + ln 2 − 1`
    pub c2: f64,
    /// `e^{c2 − 1}`
    pub c_prefactor: f64,
}

/// Evaluates [`AsymptoticConstants`]; the tail integral is cut at `u = 40`
/// where the integrand is below `e^{−80}`.
pub fn asymptotic_constants() -> Result<AsymptoticConstants> {
    let tol = Tolerance::new(1e-15, 1e-14, 2000)?;
    let head = integrate_adaptive(
        |u: f64| {
            if u < 1e-8 {
                1.0 - u * u / 3.0
            } else {
                u.tanh() / u
            }
        },
        0.0,
        1.0,
        &tol,
    )?;
    let tail = integrate_adaptive(|u: f64| (u.tanh() - 1.0) / u, 1.0, 40.0, &tol)?;
    let c1 = head + tail;
    let c2 = c1 + LN_2 - 1.0;
    Ok(AsymptoticConstants {
        c1,
        c2,
        c_prefactor: (c2 - 1.0).exp(),
    })
}

/// Second-order data at the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationData {
    pub mu: f64,
    pub theta_c: f64,
    pub w_star: f64,
    /// `(4/π)∫h″(x²cos²s)cos⁴s`
    pub a: f64,
    /// `(4/π)∫h″(x²cos²s)sin²s cos²s`
    pub b: f64,
    /// `(4/π)∫h″(x²cos²s)sin⁴s`
    pub c_int: f64,
    pub det_j: f64,
    /// `dδ²/dθ` at `θ_c`
    pub delta_prime: f64,
    /// `√(−delta_prime)`
    pub coeff: f64,
}

fn curvature_integrals(x: f64) -> Result<(f64, f64, f64)> {
    let at = |s: f64| {
        let (sn, c) = s.sin_cos();
        (h_second(x * x * c * c), c * c, sn * sn)
    };
    let a = quarter_mean(|s| {
        let (h, c2, _) = at(s);
        h * c2 * c2
    })?;
    let b = quarter_mean(|s| {
        let (h, c2, s2) = at(s);
        h * c2 * s2
    })?;
    let c = quarter_mean(|s| {
        let (h, _, s2) = at(s);
        h * s2 * s2
    })?;
    Ok((a, b, c))
}

/// `A, B, C`, the Jacobian determinant and `Δ′(θ_c)` for `Δ = δ²`:
/// `det J = −μC/(W²θ) + 2W(AC − B²)/θ⁴` and
/// `Δ′ = −(2Wμ/(θ² det J))·((B − A) + μθ³/(2W³))`.
pub fn bifurcation_data(mu: f64) -> Result<BifurcationData> {
    let cp = theta_critical_thermo(mu)?;
    let (theta, w) = (cp.theta_c(), cp.w_star());
    let (a, b, c_int) = curvature_integrals(cp.x())?;
    let det_j = -mu / (w * w * theta) * c_int + 2.0 * w / theta.powi(4) * (a * c_int - b * b);
    if !(det_j > 0.0) {
        return Err(Error::Consistency(format!(
            "Jacobian determinant {det_j} is not positive at mu = {mu}"
        )));
    }
    let delta_prime = -(2.0 * w * mu / (theta * theta)) / det_j
        * ((b - a) + mu * theta.powi(3) / (2.0 * w.powi(3)));
    if !(delta_prime < 0.0) {
        return Err(Error::Consistency(format!(
            "amplitude derivative {delta_prime} is not negative at mu = {mu}"
        )));
    }
    Ok(BifurcationData {
        mu,
        theta_c: theta,
        w_star: w,
        a,
        b,
        c_int,
        det_j,
        delta_prime,
        coeff: (-delta_prime).sqrt(),
    })
}

/// `dδ²/dθ` at `θ_c` by the implicit function theorem applied directly to
/// the stationarity system in `(W, δ²)`, without the closed form used by
/// [`bifurcation_data`].
pub fn delta_prime_implicit(mu: f64) -> Result<f64> {
    let cp = theta_critical_thermo(mu)?;
    let (theta, w) = (cp.theta_c(), cp.w_star());
    let g = DimerFunctional::new(mu, Kernel::Thermal(theta), Measure::Continuum)?;
    let (_, j) = g.reduced_system(w, 0.0)?;
    // θ-derivative of h_θ′(X) = h′(y)/(4θ) with y = X/(4θ²)
    let dtheta = |c2: f64| {
        let y = w * w * c2 / (theta * theta);
        -(2.0 * y * h_second(y) + h_prime(y)) / (4.0 * theta * theta)
    };
    let fw_theta = -g.average(|c2, _| dtheta(c2) * 8.0 * w * c2)?;
    let fd_theta = -g.average(|c2, s2| dtheta(c2) * 8.0 * s2)?;
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    // solve J·(W′, Δ′) = −∂θF
    Ok(-(j[0][0] * fd_theta - j[1][0] * fw_theta) / det)
}

/// One point of [`phase_diagram`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub mu: f64,
    pub result: Result<CriticalPoint>,
}

/// `θ_c` over a stiffness grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    /// In input order.
    pub points: Vec<PhasePoint>,
    /// Whether the successful points have `θ_c` strictly decreasing in `μ`.
    pub monotone_decreasing: bool,
}

/// Maps [`theta_critical_thermo_with`] over `mu_grid` in parallel. Failures
/// are kept per point.
pub fn phase_diagram(mu_grid: &[f64], tol: &Tolerance) -> PhaseDiagram {
    let points: Vec<PhasePoint> = mu_grid
        .par_iter()
        .map(|&mu| PhasePoint {
            mu,
            result: theta_critical_thermo_with(mu, tol),
        })
        .collect();
    let mut ok: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.result.as_ref().ok().map(|c| (p.mu, c.theta_c())))
        .collect();
    ok.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone_decreasing = ok.windows(2).all(|w| w[0].0 == w[1].0 || w[1].1 < w[0].1);
    PhaseDiagram {
        points,
        monotone_decreasing,
    }
}
