//! The infinite chain at zero temperature.
//!
//! `g₀(W, δ) = (μ/2)((W−1)² + δ²) − (4/π)∫₀^{π/2}√(W²sin²s + δ²cos²s) ds`.
//! The undimerized optimum is explicit; the dimerized one lies lower by an
//! amount that decays like `e^{−πμ/2}`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dimer::{DimerFunctional, DimerState, Kernel, Measure};
use crate::error::{domain, Error, Result};

/// Gaps at or below this are not distinguished from zero.
pub const GAP_RESOLUTION: f64 = 1e-10;
/// Largest stiffness at which an unresolved gap is an error.
pub const GAP_REQUIRED_UP_TO: f64 = 8.0;

fn ground_functional(mu: f64) -> Result<DimerFunctional> {
    DimerFunctional::new(mu, Kernel::Ground, Measure::Continuum)
}

/// `g₀` at a dimer state.
pub fn g_zero(s: &DimerState, mu: f64) -> Result<f64> {
    g_zero_raw(s.w(), s.delta(), mu)
}

/// `g₀` for any `W, δ ≥ 0`.
pub fn g_zero_raw(w: f64, delta: f64, mu: f64) -> Result<f64> {
    ground_functional(mu)?.value(w, delta)
}

/// `(W₁, f₀,per) = (1 + 4/(πμ), −4/π − 8/(π²μ))`.
pub fn periodic_optimum_zero(mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain("mu", mu, "finite mu > 0"));
    }
    Ok((1.0 + 4.0 / (PI * mu), -4.0 / PI - 8.0 / (PI * PI * mu)))
}

/// Numerical minimum of `g₀(·, 0)`.
pub fn periodic_optimum_numeric(mu: f64) -> Result<(f64, f64)> {
    ground_functional(mu)?.minimize_periodic()
}

/// Best undimerized and dimerized energies at one stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub mu: f64,
    pub w1: f64,
    pub f0_per: f64,
    pub f0: f64,
    /// `f0_per − f0`
    pub gap: f64,
    pub w_opt: f64,
    pub delta_opt: f64,
    /// `gap > GAP_RESOLUTION`
    pub resolved: bool,
}

/// The dimerization scale `e^{−(πμ/4 + 1/2)}`.
pub fn delta_scale(mu: f64) -> f64 {
    (-(PI * mu / 4.0 + 0.5)).exp()
}

/// Minimizes `g₀` over `W, δ ≥ 0` starting from the undimerized optimum and
/// amplitudes around [`delta_scale`].
///
/// An unresolved gap is an error for `μ ≤ 8` and is reported with
/// `resolved = false` beyond.
pub fn dimer_optimum_zero(mu: f64) -> Result<GapResult> {
    let (w1, f0_per) = periodic_optimum_zero(mu)?;
    let scale = delta_scale(mu);
    let (state, value) = ground_functional(mu)?.minimize(&[scale, 0.3 * scale, 3.0 * scale])?;
    let (f0, w_opt, delta_opt) = if value < f0_per {
        (value, state.w(), state.delta())
    } else {
        (f0_per, w1, 0.0)
    };
    let gap = f0_per - f0;
    let resolved = gap > GAP_RESOLUTION;
    if !resolved && mu <= GAP_REQUIRED_UP_TO {
        return Err(Error::UnresolvedGap { mu, gap });
    }
    Ok(GapResult {
        mu,
        w1,
        f0_per,
        f0,
        gap,
        w_opt,
        delta_opt,
        resolved,
    })
}

/// Least-squares line through `(μ, ln gap)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFit {
    pub slope: f64,
    pub intercept: f64,
    /// Stiffness values whose gap entered the fit.
    pub used: Vec<f64>,
}

/// Fits `ln(gap)` against `μ`, skipping points whose gap is unresolved.
pub fn gap_rate_fit(mu_values: &[f64]) -> Result<GapFit> {
    let gaps: Vec<Option<GapResult>> = mu_values
        .par_iter()
        .map(|&mu| dimer_optimum_zero(mu).ok().filter(|g| g.resolved))
        .collect();
    let points: Vec<(f64, f64)> = gaps
        .into_iter()
        .flatten()
        .map(|g| (g.mu, g.gap.ln()))
        .collect();
    let (slope, intercept) = fit_line(&points)?;
    Ok(GapFit {
        slope,
        intercept,
        used: points.iter().map(|p| p.0).collect(),
    })
}

/// Ordinary least squares `y = slope·x + intercept` over at least 3 points.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "a rate fit needs at least 3 resolved points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Invalid(
            "rate fit needs distinct stiffness values".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::Sign;
    use crate::finite_chain::ModelParams;
    use crate::kernels::elliptic_side;
    use crate::thermodynamic::g_thermo_raw;
    use proptest::prelude::*;

    #[test]
    fn undimerized_energy_is_linear_in_w() {
        for &w in &[0.5, 1.0, 1.7] {
            let v = g_zero_raw(w, 0.0, 2.0).unwrap();
            assert!((v - ((w - 1.0f64).powi(2) - 4.0 * w / PI)).abs() < 1e-13);
        }
    }

    #[test]
    fn equal_parameters_give_constant_integrand() {
        let (c, mu) = (0.7, 3.0);
        let v = g_zero_raw(c, c, mu).unwrap();
        let oracle = 0.5 * mu * ((c - 1.0f64).powi(2) + c * c) - 2.0 * c;
        assert!((v - oracle).abs() < 1e-13);
    }

    #[test]
    fn cold_thermal_limit() {
        let p = ModelParams::infinite(2.0, 1e-4).unwrap();
        let a = g_thermo_raw(1.0, 0.1, &p).unwrap();
        let b = g_zero_raw(1.0, 0.1, 2.0).unwrap();
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn periodic_closed_forms() {
        let (w1, f) = periodic_optimum_zero(2.0).unwrap();
        assert!((w1 - (1.0 + 2.0 / PI)).abs() < 1e-15);
        assert!((f + 4.0 / PI + 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((w1 - 1.636_62).abs() < 1e-5 && (f + 1.678_525).abs() < 1e-5);
        let (w, f) = periodic_optimum_zero(1e12).unwrap();
        assert!((w - 1.0).abs() < 1e-11 && (f + 4.0 / PI).abs() < 1e-11);
        for &mu in &[0.5, 2.0, 8.0] {
            let (w1, f1) = periodic_optimum_zero(mu).unwrap();
            let (wn, fnum) = periodic_optimum_numeric(mu).unwrap();
            assert!(
                (w1 - wn).abs() < 1e-8 && (f1 - fnum).abs() < 1e-8,
                "mu = {mu}"
            );
        }
    }

    #[test]
    fn gap_examples() {
        let g = dimer_optimum_zero(2.0).unwrap();
        let scale = delta_scale(2.0);
        assert!(g.gap > 0.0);
        assert!(
            g.delta_opt > scale / 3.0 && g.delta_opt < 3.0 * scale,
            "{}",
            g.delta_opt
        );
        let g6 = dimer_optimum_zero(6.0).unwrap();
        assert!(
            g6.gap > 0.0 && g6.gap <= (-3.0 * PI).exp() * 2.0,
            "{}",
            g6.gap
        );
        let soft = dimer_optimum_zero(0.5).unwrap();
        assert!(soft.gap > 0.05 && soft.gap < 1.0, "{}", soft.gap);
    }

    #[test]
    fn gap_beats_grid_scan() {
        let g = dimer_optimum_zero(2.0).unwrap();
        let mut best = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                best = best.min(g_zero_raw(1.0 + 0.01 * i as f64, 0.01 * j as f64, 2.0).unwrap());
            }
        }
        assert!(g.f0 <= best + 1e-12);
        assert!(best < g.f0_per);
    }

    #[test]
    fn gap_rate() {
        let fit = gap_rate_fit(&[3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((fit.slope + PI / 2.0).abs() < 0.08, "{}", fit.slope);
        assert!(fit.intercept.is_finite() && fit.intercept.abs() < 3.0);
        assert!(gap_rate_fit(&[2.0]).is_err());
    }

    #[test]
    fn gap_is_strict_and_log_gap_near_linear() {
        let gaps: Vec<f64> = (1..=6)
            .map(|m| dimer_optimum_zero(m as f64).unwrap().gap)
            .collect();
        assert!(gaps.iter().all(|&g| g > 0.0));
        let logs: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let slopes: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(slopes.iter().all(|&s| s < 0.0));
        for w in slopes[2..].windows(2) {
            assert!(((w[1] - w[0]) / w[0]).abs() < 0.1, "{slopes:?}");
        }
    }

    proptest! {
        #[test]
        fn integral_is_swap_symmetric(w in 0.0f64..2.0, d in 0.0f64..2.0, mu in 0.1f64..5.0) {
            let lhs = g_zero_raw(w, d, mu).unwrap();
            let rhs = g_zero_raw(d, w, mu).unwrap()
                + 0.5 * mu * ((w - 1.0).powi(2) - (d - 1.0).powi(2) + d * d - w * w);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn elliptic_change_of_variables(w in 0.1f64..2.0, frac in 0.0f64..0.999) {
            let d = frac * w;
            let integral = 0.5 * ((w - 1.0).powi(2) + d * d) - g_zero_raw(w, d, 1.0).unwrap();
            let direct = 4.0 / PI * crate::numerics::integrate_adaptive(
                |s: f64| (w * w * s.sin().powi(2) + d * d * s.cos().powi(2)).sqrt(),
                0.0,
                PI / 2.0,
                &crate::numerics::Tolerance::new(1e-14, 1e-13, 4000).unwrap(),
            ).unwrap();
            let elliptic = w * elliptic_side(d * d / (w * w)).unwrap() * (2.0 / PI) * 2.0;
            prop_assert!((integral - direct).abs() < 1e-8);
            prop_assert!((elliptic - direct).abs() < 1e-8);
        }

        #[test]
        fn state_and_raw_agree(w in 0.5f64..2.0, frac in 0.0f64..1.0) {
            let s = DimerState::new(w, frac * w, Sign::Minus).unwrap();
            prop_assert_eq!(g_zero(&s, 2.0).unwrap(), g_zero_raw(w, frac * w, 2.0).unwrap());
        }
    }
}
