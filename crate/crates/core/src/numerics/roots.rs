use super::{Bracket, NumericsError, Tolerance};

/// Finds `x` in `bracket` with `f(x) = target` for an increasing `f`.
///
/// Secant steps are taken inside the current bracket; whenever a step fails
/// to halve the bracket the next step is a plain bisection, so the bracket
/// shrinks geometrically no matter how the secant behaves. Stops when
/// `|f(x) - target| <= abs_tol` or the bracket width drops below
/// `rel_tol·|x|` (or to adjacent floats).
pub fn solve_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    bracket: Bracket,
    tol: &Tolerance,
) -> Result<f64, NumericsError> {
    let mut lo = bracket.lo();
    let mut hi = bracket.hi();
    let mut g_lo = f(lo) - target;
    let mut g_hi = f(hi) - target;
    if g_lo.is_nan() || g_hi.is_nan() || g_lo > 0.0 || g_hi < 0.0 {
        return Err(NumericsError::NotBracketed {
            target,
            f_lo: g_lo + target,
            f_hi: g_hi + target,
        });
    }
    if g_lo.abs() <= tol.abs_tol() {
        return Ok(lo);
    }
    if g_hi.abs() <= tol.abs_tol() {
        return Ok(hi);
    }

    let mut bisect_next = false;
    for _ in 0..tol.max_iter() {
        let width = hi - lo;
        let best = if g_lo.abs() < g_hi.abs() { lo } else { hi };
        if width <= tol.rel_tol() * best.abs()
            || width <= 4.0 * f64::EPSILON * best.abs().max(f64::MIN_POSITIVE)
        {
            return Ok(best);
        }

        let mid = lo + 0.5 * width;
        let x = if bisect_next || !(g_hi > g_lo) {
            mid
        } else {
            let s = lo - g_lo * width / (g_hi - g_lo);
            // keep the secant point strictly inside the bracket
            let margin = 1e-3 * width;
            if s.is_finite() {
                s.clamp(lo + margin, hi - margin)
            } else {
                mid
            }
        };
        if !(x > lo && x < hi) {
            return Ok(best);
        }

        let g = f(x) - target;
        if g.is_nan() {
            return Err(NumericsError::InvalidInput(format!(
                "function returned NaN at x = {x}"
            )));
        }
        if g.abs() <= tol.abs_tol() {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
            g_lo = g;
        } else {
            hi = x;
            g_hi = g;
        }
        bisect_next = hi - lo > 0.5 * width;
    }

    Err(NumericsError::RootNonConvergence {
        best: if g_lo.abs() < g_hi.abs() { lo } else { hi },
        iterations: tol.max_iter(),
    })
}
