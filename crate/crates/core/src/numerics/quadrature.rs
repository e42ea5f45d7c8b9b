use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{NumericsError, Tolerance};

// 15-point Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    // error estimate is the rounding floor; splitting cannot improve it
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss–Kronrod 7/15 panel with the QUADPACK error heuristic.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if error <= floor {
            error = floor;
            at_floor = true;
        }
    }
    Panel {
        a,
        b,
        result,
        error,
        at_floor,
    }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol + rel_tol·|I|`. `tol.max_iter()` caps the
/// number of panels; hitting it (or a panel that can no longer be split)
/// returns the best estimate inside the error. When the worst panel's
/// estimate is already at the rounding floor `50·eps·∫|f|` the current sum is
/// returned, since the request is below attainable accuracy.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<f64, NumericsError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInput(format!(
            "integration limits must satisfy a < b (a = {a}, b = {b})"
        )));
    }

    let first = gauss_kronrod(&f, a, b);
    if !first.result.is_finite() {
        return Err(NumericsError::InvalidInput(
            "integrand is not finite on the interval".into(),
        ));
    }
    let mut total = first.result;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_err > tol.bound(total) {
        if heap.len() >= tol.max_iter() {
            return Err(NumericsError::QuadratureNonConvergence {
                estimate: total,
                error_bound: total_err,
            });
        }
        if heap.peek().is_some_and(|p| p.at_floor) {
            // every panel is limited by rounding
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(NumericsError::QuadratureNonConvergence {
                estimate: total,
                error_bound: total_err,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        if !(left.result.is_finite() && right.result.is_finite()) {
            return Err(NumericsError::InvalidInput(
                "integrand is not finite on the interval".into(),
            ));
        }
        total += left.result + right.result - worst.result;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // keep the running sums from drifting
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.result).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }

    Ok(heap.iter().map(|p| p.result).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tight() -> Tolerance {
        Tolerance::new(1e-13, 1e-13, 2000).unwrap()
    }

    #[test]
    fn linear_is_exact() {
        let v = integrate_adaptive(|s| s, 0.0, 1.0, &tight()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_quarter_period() {
        let v = integrate_adaptive(f64::cos, 0.0, FRAC_PI_2, &tight()).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_against_arcsin() {
        let b = 1.0 - 1e-12;
        let tol = Tolerance::new(1e-9, 1e-9, 5000).unwrap();
        let v = integrate_adaptive(|u| 1.0 / (1.0 - u * u).sqrt(), 0.0, b, &tol).unwrap();
        assert!((v - b.asin()).abs() < 1e-5, "{v} vs {}", b.asin());
        assert!((v - FRAC_PI_2).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate_adaptive(|s| s, 1.0, 1.0, &tight()).is_err());
        assert!(integrate_adaptive(|s| s, 2.0, 1.0, &tight()).is_err());
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let tol = Tolerance::new(1e-15, 0.0, 3).unwrap();
        let err = integrate_adaptive(|u| 1.0 / u.sqrt(), 0.0, 1.0, &tol).unwrap_err();
        match err {
            NumericsError::QuadratureNonConvergence {
                estimate,
                error_bound,
            } => {
                assert!(estimate > 1.0 && estimate < 2.1);
                assert!(error_bound > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn steep_boundary_layer() {
        // tanh(x cos s)/cos s with a layer of width 1/x at s = pi/2
        let x = 1e4;
        let v = integrate_adaptive(
            |s: f64| s.cos() * (x * s.cos()).tanh(),
            0.0,
            FRAC_PI_2,
            &tight(),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-7);
        let w = integrate_adaptive(|s: f64| (8.0 * s).sin().powi(2), 0.0, PI, &tight()).unwrap();
        assert!((w - FRAC_PI_2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn additive_over_split(c in 0.05f64..2.95) {
            let tol = tight();
            let f = |s: f64| s.exp() * (3.0 * s).sin() + 1.0 / (1.0 + s * s);
            let whole = integrate_adaptive(f, 0.0, 3.0, &tol).unwrap();
            let left = integrate_adaptive(f, 0.0, c, &tol).unwrap();
            let right = integrate_adaptive(f, c, 3.0, &tol).unwrap();
            let bound = 2.0 * (tol.bound(whole) + tol.bound(left) + tol.bound(right));
            prop_assert!((whole - left - right).abs() <= bound.max(1e-12));
        }
    }
}
