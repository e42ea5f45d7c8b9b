use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NumericsError, Tolerance};

/// Seed of the Cranley–Patterson shift applied to the Halton start lattice.
pub const MULTISTART_SEED: u64 = 0x5EED_0F_D1AE5;

/// Coordinate-wise box; `upper` entries may be `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, NumericsError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(NumericsError::InvalidInput(format!(
                "bounds need matching non-empty dimensions ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || lo.is_nan() || lo == f64::INFINITY {
                return Err(NumericsError::InvalidInput(format!(
                    "coordinate {i}: lower bound {lo} must be below upper bound {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Lower bounds only.
    pub fn lower(lower: Vec<f64>) -> Result<Self, NumericsError> {
        let upper = vec![f64::INFINITY; lower.len()];
        Self::new(lower, upper)
    }

    /// The same interval in every one of `dim` coordinates.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, NumericsError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    fn project(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Result of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn for_dim(n: usize) -> Self {
        if n <= 2 {
            Self {
                reflect: 1.0,
                expand: 2.0,
                contract: 0.5,
                shrink: 0.5,
            }
        } else {
            // dimension-adaptive coefficients (Gao & Han)
            let n = n as f64;
            Self {
                reflect: 1.0,
                expand: 1.0 + 2.0 / n,
                contract: 0.75 - 0.5 / n,
                shrink: 1.0 - 1.0 / n,
            }
        }
    }
}

fn initial_simplex(x0: &[f64], bounds: &Bounds) -> Vec<Vec<f64>> {
    let n = x0.len();
    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        let mut step = (0.1 * x0[i].abs()).max(0.05);
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        if hi.is_finite() {
            step = step.min(0.5 * (hi - lo));
        }
        if x0[i] + step <= hi {
            v[i] = x0[i] + step;
        } else if x0[i] - step >= lo {
            v[i] = x0[i] - step;
        } else {
            v[i] = 0.5 * (lo + hi);
        }
        simplex.push(v);
    }
    simplex
}

/// Derivative-free minimization of `f` over a box, starting at `init`.
///
/// Nelder–Mead with every trial point projected back onto the box. Once the
/// simplex has collapsed (value spread within `abs_tol + rel_tol·|f|`,
/// diameter within the square root of that) it is rebuilt around the best
/// point; the search ends when such a restart no longer improves the value.
/// `tol.max_iter()` bounds the total number of simplex steps.
pub fn minimize_box<F: Fn(&[f64]) -> f64>(
    f: F,
    init: &[f64],
    bounds: &Bounds,
    tol: &Tolerance,
) -> Result<Minimum, NumericsError> {
    let n = bounds.dim();
    if init.len() != n {
        return Err(NumericsError::InvalidInput(format!(
            "start point has {} coordinates, bounds have {n}",
            init.len()
        )));
    }
    if !bounds.contains(init) {
        return Err(NumericsError::InvalidInput(format!(
            "start point {init:?} lies outside the box"
        )));
    }
    let coef = Coefficients::for_dim(n);
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut iterations = 0usize;
    let mut best_point = init.to_vec();
    let mut best_value = eval(init);

    loop {
        let mut simplex = initial_simplex(&best_point, bounds);
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
        let start_value = best_value;

        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let ftol = tol.bound(values[0]) + 4.0 * f64::EPSILON * values[0].abs();
            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= ftol && diameter <= ftol.sqrt() {
                break;
            }
            if iterations >= tol.max_iter() {
                return Err(NumericsError::MinimizerMaxIter {
                    best_point: simplex[0].clone(),
                    best_value: values[0],
                    iterations,
                });
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for v in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / n as f64;
                }
            }
            let along = |t: f64, target: &[f64]| {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(target)
                    .map(|(c, x)| c + t * (x - c))
                    .collect();
                bounds.project(&mut p);
                p
            };

            let worst = simplex[n].clone();
            let reflected = along(-coef.reflect, &worst);
            let f_r = eval(&reflected);
            if f_r < values[0] {
                let expanded = along(-coef.reflect * coef.expand, &worst);
                let f_e = eval(&expanded);
                if f_e < f_r {
                    simplex[n] = expanded;
                    values[n] = f_e;
                } else {
                    simplex[n] = reflected;
                    values[n] = f_r;
                }
                continue;
            }
            if f_r < values[n - 1] {
                simplex[n] = reflected;
                values[n] = f_r;
                continue;
            }
            let (contracted, accept) = if f_r < values[n] {
                let c = along(-coef.reflect * coef.contract, &worst);
                let f_c = eval(&c);
                (c, (f_c <= f_r).then_some(f_c))
            } else {
                let c = along(coef.contract, &worst);
                let f_c = eval(&c);
                (c, (f_c < values[n]).then_some(f_c))
            };
            if let Some(f_c) = accept {
                simplex[n] = contracted;
                values[n] = f_c;
                continue;
            }
            let anchor = simplex[0].clone();
            for i in 1..=n {
                let mut p: Vec<f64> = anchor
                    .iter()
                    .zip(&simplex[i])
                    .map(|(a, x)| a + coef.shrink * (x - a))
                    .collect();
                bounds.project(&mut p);
                values[i] = eval(&p);
                simplex[i] = p;
            }
        }

        if values[0] < best_value {
            best_value = values[0];
            best_point = simplex[0].clone();
        }
        let ftol = tol.bound(best_value) + 4.0 * f64::EPSILON * best_value.abs();
        if start_value - best_value <= ftol {
            return Ok(Minimum {
                point: best_point,
                value: best_value,
                iterations,
            });
        }
    }
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut scale = inv;
    while index > 0 {
        result += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    result
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if out
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| candidate % p != 0)
        {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// The deterministic start points used by [`minimize_multistart`]: a Halton
/// lattice over the box, shifted modulo 1 by a [`MULTISTART_SEED`]-seeded
/// offset so that no start sits on the box corner.
pub fn start_points(bounds: &Bounds, count: usize) -> Result<Vec<Vec<f64>>, NumericsError> {
    if !bounds.is_bounded() {
        return Err(NumericsError::InvalidInput(
            "multistart needs a bounded box".into(),
        ));
    }
    let dim = bounds.dim();
    let bases = primes(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(MULTISTART_SEED);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    Ok((0..count as u64)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let u = (radical_inverse(i + 1, bases[j]) + shift[j]).fract();
                    let (lo, hi) = (bounds.lower[j], bounds.upper[j]);
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect())
}

/// Runs [`minimize_box`] from `n_starts` lattice points and keeps the best.
///
/// An error is returned only when every start fails.
pub fn minimize_multistart<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &Bounds,
    n_starts: usize,
    tol: &Tolerance,
) -> Result<Minimum, NumericsError> {
    if n_starts == 0 {
        return Err(NumericsError::InvalidInput("n_starts must be >= 1".into()));
    }
    let mut best: Option<Minimum> = None;
    let mut last_err = None;
    for start in start_points(bounds, n_starts)? {
        match minimize_box(&f, &start, bounds, tol) {
            Ok(m) => {
                if best.as_ref().is_none_or(|b| m.value < b.value) {
                    best = Some(m);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one start was attempted"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight(dim: usize) -> Tolerance {
        Tolerance::new(1e-14, 0.0, 2000 * dim).unwrap()
    }

    #[test]
    fn quadratic_bowl_on_the_boundary() {
        let b = Bounds::lower(vec![0.0, 0.0]).unwrap();
        let m = minimize_box(
            |x| (x[0] - 1.0).powi(2) + x[1] * x[1],
            &[2.0, 1.0],
            &b,
            &Tolerance::minimizer(2),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-4);
        assert!(m.point[1].abs() < 1e-4);
        assert!(m.value < 1e-9);
    }

    #[test]
    fn shifted_bowl() {
        let b = Bounds::lower(vec![0.0, 0.0]).unwrap();
        let m = minimize_box(
            |x| (x[0] - 1.0).powi(2) + (x[1] - 0.3).powi(2),
            &[0.5, 0.5],
            &b,
            &tight(2),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-6);
        assert!((m.point[1] - 0.3).abs() < 1e-6);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn rosenbrock_needs_restarts() {
        let b = Bounds::lower(vec![-5.0, -5.0]).unwrap();
        let m = minimize_box(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &b,
            &tight(2),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-5, "{:?}", m.point);
    }

    #[test]
    fn higher_dimension() {
        let b = Bounds::cube(8, -3.0, 3.0).unwrap();
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.1 * i as f64).powi(2))
                .sum::<f64>()
        };
        let m = minimize_box(f, &[1.0; 8], &b, &tight(8)).unwrap();
        for (i, v) in m.point.iter().enumerate() {
            assert!((v - 0.1 * i as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn start_outside_box_is_rejected() {
        let b = Bounds::lower(vec![0.0]).unwrap();
        assert!(minimize_box(|x| x[0] * x[0], &[-1.0], &b, &tight(1)).is_err());
    }

    #[test]
    fn iteration_cap_reports_best_point() {
        let b = Bounds::lower(vec![-10.0, -10.0]).unwrap();
        let t = Tolerance::new(1e-14, 0.0, 5).unwrap();
        let err =
            minimize_box(|x| (x[0] - 3.0).powi(2) + x[1].powi(2), &[0.0, 0.0], &b, &t).unwrap_err();
        match err {
            NumericsError::MinimizerMaxIter {
                best_point,
                best_value,
                ..
            } => {
                assert_eq!(best_point.len(), 2);
                assert!(best_value < 9.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multistart_cosine() {
        let b = Bounds::cube(1, 0.0, 2.0).unwrap();
        let m = minimize_multistart(|x| (3.0 * x[0]).cos(), &b, 8, &tight(1)).unwrap();
        assert!((m.point[0] - PI / 3.0).abs() < 1e-6);
        assert!((m.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn multistart_double_well() {
        let b = Bounds::cube(1, -2.0, 2.0).unwrap();
        let m = minimize_multistart(|x| (x[0] * x[0] - 1.0).powi(2), &b, 4, &tight(1)).unwrap();
        assert!(m.value < 1e-12);
        assert!((m.point[0].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multistart_beats_every_single_start() {
        let b = Bounds::cube(2, -3.0, 3.0).unwrap();
        let f = |x: &[f64]| {
            (2.0 * x[0]).sin() * (3.0 * x[1]).cos() + 0.05 * (x[0] * x[0] + x[1] * x[1])
        };
        let tol = tight(2);
        let best = minimize_multistart(f, &b, 12, &tol).unwrap();
        for start in start_points(&b, 12).unwrap() {
            let single = minimize_box(f, &start, &b, &tol).unwrap();
            assert!(best.value <= single.value);
        }
    }

    #[test]
    fn start_points_are_deterministic_and_inside() {
        let b = Bounds::cube(5, 0.05, 3.0).unwrap();
        let a = start_points(&b, 20).unwrap();
        assert_eq!(a, start_points(&b, 20).unwrap());
        assert!(a.iter().all(|p| b.contains(p)));
        assert!(start_points(&Bounds::lower(vec![0.0]).unwrap(), 3).is_err());
    }
}
