//! The two-parameter dimer reduction shared by the finite-ring, infinite-chain
//! and zero-temperature models.
//!
//! For `t_i = W ± (−1)^i δ` the squared spectrum of the hopping matrix is
//! `4W²cos²q + 4δ²sin²q`, so every energy in the crate has the form
//! `(μ/2)[(W−1)² + δ²] − ⟨F(4W²cos²q + 4δ²sin²q)⟩` with `F = h_θ` (or `√·`
//! at zero temperature) and `⟨·⟩` either the average over the ring momenta
//! `q = 2kπ/L` or the continuum mean over `q ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::kernels::{elliptic_side, h_prime, h_second, h_theta_unchecked};
use crate::numerics::{integrate_adaptive, minimize_box, Bounds, Tolerance};

/// Amplitudes below this are reported as an undimerized state.
pub const DELTA_ZERO_THRESHOLD: f64 = 1e-8;

/// Which of the two alternating patterns a dimerized state uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A 2-periodic hopping pattern `t_i = W + sign·(−1)^i δ`, `i = 1..L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerState {
    w: f64,
    delta: f64,
    sign: Sign,
}

impl DimerState {
    /// Requires `W ≥ δ ≥ 0` so that every bond is non-negative.
    pub fn new(w: f64, delta: f64, sign: Sign) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(domain("delta", delta, "finite delta >= 0"));
        }
        if !w.is_finite() || w < delta {
            return Err(domain("W", w, "finite W >= delta"));
        }
        Ok(Self { w, delta, sign })
    }

    /// The undimerized state `t_i = W`.
    pub fn periodic(w: f64) -> Result<Self> {
        Self::new(w, 0.0, Sign::Plus)
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_dimerized(&self) -> bool {
        self.delta > 0.0
    }

    /// The other member of the degenerate pair.
    pub fn flipped(&self) -> Self {
        Self {
            sign: self.sign.flipped(),
            ..*self
        }
    }

    /// Bond lengths `t_1..t_L` of this pattern on a ring of length `len`.
    pub fn hoppings(&self, len: usize) -> Vec<f64> {
        (1..=len)
            .map(|i| {
                let alt = if i % 2 == 0 { 1.0 } else { -1.0 };
                self.w + self.sign.value() * alt * self.delta
            })
            .collect()
    }
}

/// Per-mode electronic free energy as a function of the squared mode energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `h_θ` at temperature `θ > 0`.
    Thermal(f64),
    /// `√x`, the zero-temperature limit.
    Ground,
}

/// Momentum average used for the electronic term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// `(1/L) Σ_{k=1}^{L}` over `q = 2kπ/L`.
    Ring(usize),
    /// `(2/π) ∫₀^{π/2} dq`.
    Continuum,
}

/// `g(W, δ) = (μ/2)[(W−1)² + δ²] − ⟨F(4W²cos²q + 4δ²sin²q)⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerFunctional {
    mu: f64,
    kernel: Kernel,
    measure: Measure,
}

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-13, 4000).expect("static tolerance is valid")
}

impl DimerFunctional {
    pub fn new(mu: f64, kernel: Kernel, measure: Measure) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(domain("mu", mu, "finite mu > 0"));
        }
        if let Kernel::Thermal(theta) = kernel {
            if !(theta > 0.0) || !theta.is_finite() {
                return Err(domain("theta", theta, "finite theta > 0"));
            }
        }
        if let Measure::Ring(len) = measure {
            if len < 4 || len % 2 != 0 {
                return Err(domain("L", len as f64, "even L >= 4"));
            }
        }
        Ok(Self {
            mu,
            kernel,
            measure,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    fn f(&self, x: f64) -> f64 {
        match self.kernel {
            Kernel::Thermal(theta) => h_theta_unchecked(x, theta),
            Kernel::Ground => x.sqrt(),
        }
    }

    // F′ and F″ of the thermal kernel
    fn f_derivs(&self, x: f64) -> (f64, f64) {
        match self.kernel {
            Kernel::Thermal(theta) => {
                let y = x / (4.0 * theta * theta);
                (
                    h_prime(y) / (4.0 * theta),
                    h_second(y) / (16.0 * theta * theta * theta),
                )
            }
            Kernel::Ground => {
                let r = x.sqrt();
                (0.5 / r, -0.25 / (r * r * r))
            }
        }
    }

    /// `⟨f(cos²q, sin²q)⟩` under the measure.
    pub(crate) fn average<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<f64> {
        match self.measure {
            Measure::Ring(len) => {
                let n = len as f64;
                let sum: f64 = (1..=len)
                    .map(|k| {
                        let (s, c) = (2.0 * PI * k as f64 / n).sin_cos();
                        f(c * c, s * s)
                    })
                    .sum();
                Ok(sum / n)
            }
            Measure::Continuum => {
                let integral = integrate_adaptive(
                    |q: f64| {
                        let (s, c) = q.sin_cos();
                        f(c * c, s * s)
                    },
                    0.0,
                    FRAC_PI_2,
                    &quad_tol(),
                )?;
                Ok(integral / FRAC_PI_2)
            }
        }
    }

    fn check_point(w: f64, delta: f64) -> Result<()> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(domain("W", w, "finite W >= 0"));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(domain("delta", delta, "finite delta >= 0"));
        }
        Ok(())
    }

    /// The electronic term `⟨F(4W²cos²q + 4δ²sin²q)⟩`.
    pub fn electronic(&self, w: f64, delta: f64) -> Result<f64> {
        Self::check_point(w, delta)?;
        if let (Kernel::Ground, Measure::Continuum) = (self.kernel, self.measure) {
            // (2/π)∫ 2√(W²c² + δ²s²) = (4/π)·max·E(1 − (min/max)²)
            let (hi, lo) = if w >= delta { (w, delta) } else { (delta, w) };
            if hi == 0.0 {
                return Ok(0.0);
            }
            let ratio = lo / hi;
            return Ok(4.0 / PI * hi * elliptic_side(ratio * ratio)?);
        }
        let (w2, d2) = (4.0 * w * w, 4.0 * delta * delta);
        self.average(|c2, s2| self.f(w2 * c2 + d2 * s2))
    }

    /// `g(W, δ)` for raw parameters `W, δ ≥ 0` (no `W ≥ δ` requirement).
    pub fn value(&self, w: f64, delta: f64) -> Result<f64> {
        let elastic = 0.5 * self.mu * ((w - 1.0).powi(2) + delta * delta);
        Ok(elastic - self.electronic(w, delta)?)
    }

    /// `(∂g/∂W, ∂g/∂δ)`.
    pub fn gradient(&self, w: f64, delta: f64) -> Result<(f64, f64)> {
        Self::check_point(w, delta)?;
        let (w2, d2) = (4.0 * w * w, 4.0 * delta * delta);
        let gw = self.average(|c2, s2| self.f_derivs(w2 * c2 + d2 * s2).0 * 8.0 * w * c2)?;
        let gd = self.average(|c2, s2| self.f_derivs(w2 * c2 + d2 * s2).0 * 8.0 * delta * s2)?;
        Ok((self.mu * (w - 1.0) - gw, self.mu * delta - gd))
    }

    /// The stationarity system in `(W, Δ = δ²)` with `δ` divided out of the
    /// second equation, and its Jacobian.
    ///
    /// Returns `([F_W, F_Δ], [[∂_W F_W, ∂_Δ F_W], [∂_W F_Δ, ∂_Δ F_Δ]])` where
    /// `F_W = ∂g/∂W` and `F_Δ = μ − ⟨8 F′ sin²q⟩`.
    pub fn reduced_system(&self, w: f64, big_delta: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
        Self::check_point(w, big_delta)?;
        let (w2, d2) = (4.0 * w * w, 4.0 * big_delta);
        let at = |c2: f64, s2: f64| self.f_derivs(w2 * c2 + d2 * s2);
        let fw = self.mu * (w - 1.0) - self.average(|c2, s2| at(c2, s2).0 * 8.0 * w * c2)?;
        let fd = self.mu - self.average(|c2, s2| at(c2, s2).0 * 8.0 * s2)?;
        let j11 = self.mu
            - self.average(|c2, s2| {
                let (d1, d2) = at(c2, s2);
                let a = 8.0 * w * c2;
                d2 * a * a + d1 * 8.0 * c2
            })?;
        let cross = self.average(|c2, s2| at(c2, s2).1 * 8.0 * w * c2 * s2)?;
        let j22 = -self.average(|c2, s2| at(c2, s2).1 * 32.0 * s2 * s2)?;
        Ok(([fw, fd], [[j11, -4.0 * cross], [-8.0 * cross, j22]]))
    }

    /// Minimizes `g` over `W ≥ 0` at `δ = 0`.
    pub fn minimize_periodic(&self) -> Result<(f64, f64)> {
        let bounds = Bounds::lower(vec![0.0])?;
        let tol = Tolerance::new(1e-14, 1e-14, 2000)?;
        let start = 1.0 + 1.0 / self.mu.max(0.25);
        let m = minimize_box(
            |p: &[f64]| self.value(p[0], 0.0).unwrap_or(f64::INFINITY),
            &[start],
            &bounds,
            &tol,
        )?;
        let mut w = m.point[0];
        let mut best = m.value;
        if let Kernel::Thermal(_) = self.kernel {
            // Newton on ∂g/∂W = 0
            for _ in 0..30 {
                let ([fw, _], [[j11, _], _]) = self.reduced_system(w, 0.0)?;
                if !(j11 > 0.0) {
                    break;
                }
                let next = (w - fw / j11).max(0.0);
                let v = self.value(next, 0.0)?;
                if v > best + 1e-15 * (1.0 + best.abs()) {
                    break;
                }
                let step = (next - w).abs();
                w = next;
                best = best.min(v);
                if step <= 1e-15 * (1.0 + w) {
                    break;
                }
            }
            best = self.value(w, 0.0)?;
        } else {
            // g(·, 0) is smooth in W; Newton with central differences
            let h = 1e-3 * (1.0 + w);
            for _ in 0..10 {
                let (lo, mid, hi) = (
                    self.value(w - h, 0.0)?,
                    self.value(w, 0.0)?,
                    self.value(w + h, 0.0)?,
                );
                let curv = (hi - 2.0 * mid + lo) / (h * h);
                if !(curv > 0.0) || w <= h {
                    break;
                }
                let next = (w - (hi - lo) / (2.0 * h) / curv).max(0.0);
                let v = self.value(next, 0.0)?;
                if v > mid {
                    break;
                }
                let step = (next - w).abs();
                w = next;
                best = v;
                if step <= 1e-14 * (1.0 + w) {
                    break;
                }
            }
        }
        Ok((w, best))
    }

    // Newton on the reduced system from (w, δ); None if it leaves δ > 0
    fn polish_dimer(&self, w: f64, delta: f64) -> Result<Option<(f64, f64)>> {
        let (mut w, mut dd) = (w, delta * delta);
        for _ in 0..40 {
            let (f, j) = self.reduced_system(w, dd)?;
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det.abs() > 0.0) || !det.is_finite() {
                return Ok(None);
            }
            let sw = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
            let sd = -(j[0][0] * f[1] - j[1][0] * f[0]) / det;
            // damp steps that would leave the admissible region
            let mut scale = 1.0;
            while (w + scale * sw <= 0.0 || dd + scale * sd <= 0.0) && scale > 1e-6 {
                scale *= 0.5;
            }
            if w + scale * sw <= 0.0 || dd + scale * sd <= 0.0 {
                return Ok(None);
            }
            w += scale * sw;
            dd += scale * sd;
            if scale == 1.0 && sw.abs() <= 1e-14 * w && sd.abs() <= 1e-14 * dd {
                return Ok(Some((w, dd.sqrt())));
            }
        }
        let (f, _) = self.reduced_system(w, dd)?;
        if f[0].abs() < 1e-10 && f[1].abs() < 1e-10 {
            Ok(Some((w, dd.sqrt())))
        } else {
            Ok(None)
        }
    }

    /// Minimizes `g` over `W, δ ≥ 0`.
    ///
    /// The undimerized branch and simplex searches from several amplitudes
    /// (plus any in `extra_deltas`) are compared; at positive temperature the
    /// dimerized candidate is refined by Newton's method on the stationarity
    /// system. An amplitude below [`DELTA_ZERO_THRESHOLD`] is reported as 0.
    pub fn minimize(&self, extra_deltas: &[f64]) -> Result<(DimerState, f64)> {
        let (w_per, v_per) = self.minimize_periodic()?;
        let bounds = Bounds::lower(vec![0.0, 0.0])?;
        let tol = Tolerance::new(1e-15, 1e-14, 4000)?;
        let mut best: Option<(f64, f64, f64)> = None;
        let mut starts: Vec<f64> = vec![0.5 * w_per, 0.1 * w_per];
        starts.extend(
            extra_deltas
                .iter()
                .copied()
                .filter(|d| d.is_finite() && *d > 0.0),
        );
        for d0 in starts {
            let m = match minimize_box(
                |p: &[f64]| self.value(p[0], p[1]).unwrap_or(f64::INFINITY),
                &[w_per, d0],
                &bounds,
                &tol,
            ) {
                Ok(m) => m,
                Err(crate::numerics::NumericsError::MinimizerMaxIter {
                    best_point,
                    best_value,
                    ..
                }) => crate::numerics::Minimum {
                    point: best_point,
                    value: best_value,
                    iterations: 0,
                },
                Err(e) => return Err(e.into()),
            };
            let (mut w, mut d, mut v) = (m.point[0], m.point[1], m.value);
            if let Kernel::Thermal(_) = self.kernel {
                if d > 0.0 {
                    if let Some((pw, pd)) = self.polish_dimer(w, d)? {
                        let pv = self.value(pw, pd)?;
                        if pv <= v + 1e-13 * (1.0 + v.abs()) {
                            (w, d, v) = (pw, pd, pv);
                        }
                    }
                }
            }
            if best.is_none_or(|b| v < b.2) {
                best = Some((w, d, v));
            }
        }
        let (w, d, v) = best.expect("at least two starts");
        if d < DELTA_ZERO_THRESHOLD || v >= v_per {
            return Ok((DimerState::periodic(w_per)?, v_per));
        }
        if d > w {
            return Err(Error::Consistency(format!(
                "minimizer has delta = {d} above W = {w}"
            )));
        }
        Ok((DimerState::new(w, d, Sign::Plus)?, v))
    }
}
