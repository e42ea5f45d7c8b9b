//! Even rings of `L` atoms.
//!
//! The exact model minimizes `(μ/2)Σ(t_i − 1)² − Tr h_θ(T²)` over all bond
//! vectors `t`; its minimizers are 2-periodic, which reduces the problem to
//! the dimer energy [`g_finite`]. Linearizing the reduced stationarity
//! equations in `δ` gives the critical temperature [`theta_critical_finite`].

use std::f64::consts::PI;

use crate::dimer::{DimerFunctional, DimerState, Kernel, Measure};
use crate::error::{domain, Error, Result};
use crate::kernels::{electron_free_energy, h_prime};
use crate::numerics::{
    eigenvalues_symmetric, minimize_box, minimize_multistart, solve_increasing, Bounds, Bracket,
    DenseMatrix, NumericsError, Tolerance,
};

/// Largest ring accepted by [`minimize_chain_full`].
pub const FULL_SEARCH_MAX_LEN: usize = 16;
/// Bond box `[lo, hi]` of the full-configuration search.
pub const FULL_SEARCH_BOX: (f64, f64) = (0.05, 3.0);

/// Stiffness, temperature and (optionally) ring length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    mu: f64,
    theta: f64,
    len: Option<usize>,
}

impl ModelParams {
    /// `μ > 0`, `θ ≥ 0`; `len` must be even and at least 4 when given.
    pub fn new(mu: f64, theta: f64, len: Option<usize>) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain("mu", mu, "finite mu > 0"));
        }
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(domain("theta", theta, "finite theta >= 0"));
        }
        if let Some(l) = len {
            if l < 4 || l % 2 != 0 {
                return Err(domain("L", l as f64, "even L >= 4"));
            }
        }
        Ok(Self { mu, theta, len })
    }

    pub fn ring(mu: f64, theta: f64, len: usize) -> Result<Self> {
        Self::new(mu, theta, Some(len))
    }

    pub fn infinite(mu: f64, theta: f64) -> Result<Self> {
        Self::new(mu, theta, None)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub(crate) fn require_len(&self) -> Result<usize> {
        self.len
            .ok_or_else(|| Error::Invalid("this operation needs a ring length L".into()))
    }

    pub(crate) fn require_thermal(&self) -> Result<f64> {
        if self.theta > 0.0 {
            Ok(self.theta)
        } else {
            Err(domain(
                "theta",
                self.theta,
                "theta > 0 (use the zero-temperature routines)",
            ))
        }
    }
}

/// Bond lengths `t_1..t_L` of a ring, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingConfig {
    t: Vec<f64>,
}

impl HoppingConfig {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() < 4 {
            return Err(domain("L", t.len() as f64, "L >= 4"));
        }
        if let Some(&bad) = t.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(domain("t_i", bad, "finite t_i > 0"));
        }
        Ok(Self { t })
    }

    pub fn from_dimer(state: &DimerState, len: usize) -> Result<Self> {
        Self::new(state.hoppings(len))
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn bonds(&self) -> &[f64] {
        &self.t
    }

    /// Cyclic shift by `k` sites.
    pub fn rotated(&self, k: usize) -> Self {
        let mut t = self.t.clone();
        t.rotate_left(k % self.t.len());
        Self { t }
    }

    /// Largest `|t_i − t_{i+2}|`; zero exactly for 2-periodic rings.
    pub fn two_periodic_deviation(&self) -> f64 {
        let n = self.t.len();
        (0..n)
            .map(|i| (self.t[i] - self.t[(i + 2) % n]).abs())
            .fold(0.0, f64::max)
    }

    fn distortion(&self) -> f64 {
        self.t.iter().map(|v| (v - 1.0).powi(2)).sum()
    }
}

/// Periodic tridiagonal hopping matrix with `T[i][i+1] = t_i` and the corner
/// entries `T[L][1] = T[1][L] = t_L`.
pub fn build_hopping_matrix(cfg: &HoppingConfig) -> DenseMatrix {
    let n = cfg.len();
    let mut m = DenseMatrix::zeros(n);
    for (i, &t) in cfg.bonds().iter().enumerate() {
        let j = (i + 1) % n;
        m[(i, j)] = t;
        m[(j, i)] = t;
    }
    m
}

/// Ascending one-body spectrum of the ring.
pub fn chain_spectrum(cfg: &HoppingConfig) -> Result<Vec<f64>> {
    let tol = Tolerance::new(1e-15, 1e-15, 100)?;
    Ok(eigenvalues_symmetric(&build_hopping_matrix(cfg), &tol)?)
}

fn check_len(cfg: &HoppingConfig, p: &ModelParams) -> Result<()> {
    match p.len() {
        Some(l) if l != cfg.len() => Err(Error::Invalid(format!(
            "configuration has {} bonds but the parameters fix L = {l}",
            cfg.len()
        ))),
        _ => Ok(()),
    }
}

/// `(μ/2)Σ(t_i − 1)² − Tr h_θ(T²)` for `θ > 0`.
pub fn chain_free_energy(cfg: &HoppingConfig, p: &ModelParams) -> Result<f64> {
    check_len(cfg, p)?;
    let theta = p.require_thermal()?;
    let eigs = chain_spectrum(cfg)?;
    let electronic = electron_free_energy(&eigs, theta)?;
    Ok(0.5 * p.mu() * cfg.distortion() + electronic.value)
}

/// `(μ/2)Σ(t_i − 1)² − Tr|T|`.
pub fn chain_energy_zero(cfg: &HoppingConfig, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(domain("mu", mu, "mu > 0"));
    }
    let eigs = chain_spectrum(cfg)?;
    Ok(0.5 * mu * cfg.distortion() - eigs.iter().map(|e| e.abs()).sum::<f64>())
}

pub(crate) fn ring_functional(p: &ModelParams) -> Result<DimerFunctional> {
    let len = p.require_len()?;
    let theta = p.require_thermal()?;
    DimerFunctional::new(p.mu(), Kernel::Thermal(theta), Measure::Ring(len))
}

/// Dimer energy per atom
/// `(μ/2)[(W−1)² + δ²] − (1/L)Σ_k h_θ(4W²cos²(2kπ/L) + 4δ²sin²(2kπ/L))`.
pub fn g_finite(s: &DimerState, p: &ModelParams) -> Result<f64> {
    g_finite_raw(s.w(), s.delta(), p)
}

/// [`g_finite`] for any `W, δ ≥ 0`.
pub fn g_finite_raw(w: f64, delta: f64, p: &ModelParams) -> Result<f64> {
    ring_functional(p)?.value(w, delta)
}

/// Multistart search over all bond vectors in [`FULL_SEARCH_BOX`]`^L`.
///
/// Returns the best configuration and its total energy. At `θ = 0` the
/// ground-state energy is minimized instead of the free energy.
pub fn minimize_chain_full(p: &ModelParams, n_starts: usize) -> Result<(HoppingConfig, f64)> {
    let len = p.require_len()?;
    if len > FULL_SEARCH_MAX_LEN {
        return Err(domain(
            "L",
            len as f64,
            "L <= 16 for the full configuration search",
        ));
    }
    let (lo, hi) = FULL_SEARCH_BOX;
    let bounds = Bounds::cube(len, lo, hi)?;
    let energy = |t: &[f64]| -> f64 {
        let cfg = match HoppingConfig::new(t.to_vec()) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let v = if p.theta() > 0.0 {
            chain_free_energy(&cfg, p)
        } else {
            chain_energy_zero(&cfg, p.mu())
        };
        v.unwrap_or(f64::INFINITY)
    };
    let tol = Tolerance::new(1e-15, 1e-15, 4000 * len)?;
    let coarse = Tolerance::new(1e-12, 1e-12, 1000 * len)?;
    let best = minimize_multistart(energy, &bounds, n_starts, &coarse)?;
    let refined = match minimize_box(energy, &best.point, &bounds, &tol) {
        Ok(m) => m,
        Err(NumericsError::MinimizerMaxIter {
            best_point,
            best_value,
            ..
        }) if best_value <= best.value => crate::numerics::Minimum {
            point: best_point,
            value: best_value,
            iterations: 0,
        },
        Err(_) => best,
    };
    Ok((HoppingConfig::new(refined.point)?, refined.value))
}

/// Minimizes [`g_finite`] over `W, δ ≥ 0`; returns the state and the energy
/// per atom. Amplitudes below `1e-8` are reported as exactly 0.
pub fn minimize_dimer_finite(p: &ModelParams) -> Result<(DimerState, f64)> {
    ring_functional(p)?.minimize(&[])
}

fn check_ring_len(len: usize) -> Result<()> {
    if len < 4 || len % 2 != 0 {
        return Err(domain("L", len as f64, "even L >= 4"));
    }
    Ok(())
}

// cos(2kπ/L) vanishes iff 4k/L is an odd integer
fn is_node(k: usize, len: usize) -> bool {
    (4 * k) % len == 0 && ((4 * k) / len) % 2 == 1
}

/// Difference of the two linearized Euler–Lagrange equations of the ring,
/// as a function of `x = W/θ`:
/// `−(2/L) Σ_{k=1}^{L} tanh(x|c_k|)/|c_k| · cos(4kπ/L)` with `c_k = cos(2kπ/L)`.
///
/// Nodes `c_k = 0` (present iff `4 | L`) contribute `x` each, so the function
/// grows without bound for `L ≡ 0 mod 4`. For `L ≡ 2 mod 4` it increases to
/// [`dimerization_threshold`]`(L)`.
pub fn j_finite(x: f64, len: usize) -> Result<f64> {
    check_ring_len(len)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("x", x, "finite x >= 0"));
    }
    let n = len as f64;
    let mut sum = 0.0;
    for k in 1..=len {
        if is_node(k, len) {
            sum -= x;
            continue;
        }
        let c = (2.0 * PI * k as f64 / n).cos().abs();
        sum += (x * c).tanh() / c * (4.0 * PI * k as f64 / n).cos();
    }
    Ok(-2.0 * sum / n)
}

/// `−(1/(2n+1)) Σ_{k=1}^{2n+1} cos(2kπ/(2n+1)) / |cos(kπ/(2n+1))|` for
/// `L = 4n + 2`.
///
/// This equals half of `sup_x j_finite(x, L)`; see [`dimerization_threshold`].
pub fn mu_critical(len: usize) -> Result<f64> {
    if len < 6 || len % 4 != 2 {
        return Err(domain("L", len as f64, "L = 4n + 2 with n >= 1"));
    }
    let m = len / 2;
    let mf = m as f64;
    let sum: f64 = (1..=m)
        .map(|k| {
            let k = k as f64;
            (2.0 * k * PI / mf).cos() / (k * PI / mf).cos().abs()
        })
        .sum();
    Ok(-sum / mf)
}

/// Stiffness above which a ring with `L ≡ 2 mod 4` never dimerizes:
/// `lim_{x→∞} j_finite(x, L) = 2·mu_critical(L)`. Infinite for `L ≡ 0 mod 4`.
pub fn dimerization_threshold(len: usize) -> Result<f64> {
    check_ring_len(len)?;
    if len % 4 == 0 {
        Ok(f64::INFINITY)
    } else {
        Ok(2.0 * mu_critical(len)?)
    }
}

/// Critical point `(x, W*, θ_c)` of the linearized dimer equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    x: f64,
    w_star: f64,
    theta_c: f64,
}

impl CriticalPoint {
    pub(crate) fn new(x: f64, theta_c: f64) -> Result<Self> {
        if !(x > 0.0 && theta_c > 0.0) || !(x * theta_c).is_finite() {
            return Err(Error::Consistency(format!(
                "critical point must be positive (x = {x}, theta_c = {theta_c})"
            )));
        }
        Ok(Self {
            x,
            w_star: x * theta_c,
            theta_c,
        })
    }

    /// `W*/θ_c`.
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn w_star(&self) -> f64 {
        self.w_star
    }

    pub fn theta_c(&self) -> f64 {
        self.theta_c
    }
}

pub(crate) fn invert_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    start_hi: f64,
    tol: &Tolerance,
) -> Result<f64> {
    let mut hi = start_hi;
    while f(hi) < target {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::Numerics(NumericsError::NotBracketed {
                target,
                f_lo: f(0.0),
                f_hi: f(hi),
            }));
        }
    }
    Ok(solve_increasing(f, target, Bracket::new(0.0, hi)?, tol)?)
}

pub(crate) fn root_tolerance() -> Tolerance {
    Tolerance::new(1e-14, 1e-15, 400).expect("static tolerance is valid")
}

/// Critical temperature of the ring, or `None` when the ring never
/// dimerizes (`L ≡ 2 mod 4` and `μ ≥ 2·mu_critical(L)`).
pub fn theta_critical_finite(mu: f64, len: usize) -> Result<Option<CriticalPoint>> {
    theta_critical_finite_with(mu, len, &root_tolerance())
}

/// [`theta_critical_finite`] with an explicit root-solver tolerance.
pub fn theta_critical_finite_with(
    mu: f64,
    len: usize,
    tol: &Tolerance,
) -> Result<Option<CriticalPoint>> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain("mu", mu, "finite mu > 0"));
    }
    if mu >= dimerization_threshold(len)? {
        return Ok(None);
    }
    let x = invert_increasing(
        |x| j_finite(x, len).unwrap_or(f64::NAN),
        mu,
        mu.max(1.0),
        tol,
    )?;
    let n = len as f64;
    let (mut cos_part, mut sin_part) = (0.0, 0.0);
    for k in 1..=len {
        let (s, c) = (2.0 * PI * k as f64 / n).sin_cos();
        let (c2, s2) = if is_node(k, len) {
            (0.0, 1.0)
        } else {
            (c * c, s * s)
        };
        let hp = h_prime(x * x * c2);
        cos_part += hp * c2;
        sin_part += hp * s2;
    }
    cos_part /= n;
    sin_part /= n;
    let theta = 2.0 * sin_part / mu;
    let residual = mu * (x * theta - 1.0) - 2.0 * x * cos_part;
    if residual.abs() > 1e-8 * (1.0 + mu * x * theta) {
        return Err(Error::Consistency(format!(
            "first stationarity equation off by {residual:e} at x = {x}"
        )));
    }
    Ok(Some(CriticalPoint::new(x, theta)?))
}
