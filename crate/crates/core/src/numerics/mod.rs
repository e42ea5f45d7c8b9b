//! Model-agnostic numerical building blocks.
//!
//! Everything in here is a pure function of its inputs: adaptive
//! Gauss–Kronrod quadrature, a bracketing solver for increasing scalar
//! functions, a projected Nelder–Mead minimizer (with a deterministic
//! multistart driver) and a cyclic Jacobi eigensolver.

mod eigen;
mod minimize;
mod quadrature;
mod roots;

pub use eigen::{eigenvalues_symmetric, DenseMatrix};
pub use minimize::{
    minimize_box, minimize_multistart, start_points, Bounds, Minimum, MULTISTART_SEED,
};
pub use quadrature::integrate_adaptive;
pub use roots::solve_increasing;

use thiserror::Error;

/// Failures of the numerical primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid bracket: lo = {lo} must be < hi = {hi}")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },
    #[error("target {target} is not bracketed: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NotBracketed { target: f64, f_lo: f64, f_hi: f64 },
    #[error("root solve stopped after {iterations} iterations at x = {best}")]
    RootNonConvergence { best: f64, iterations: usize },
    #[error("minimizer exceeded {iterations} iterations; best value {best_value}")]
    MinimizerMaxIter {
        best_point: Vec<f64>,
        best_value: f64,
        iterations: usize,
    },
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: max |M - M^T| = {asymmetry} exceeds {allowed}")]
    NotSymmetric { asymmetry: f64, allowed: f64 },
}

/// Stopping rule shared by all iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    abs_tol: f64,
    rel_tol: f64,
    max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self, NumericsError> {
        if !(abs_tol >= 0.0) || !(rel_tol >= 0.0) {
            return Err(NumericsError::InvalidTolerance(format!(
                "tolerances must be non-negative (abs_tol = {abs_tol}, rel_tol = {rel_tol})"
            )));
        }
        if !(abs_tol + rel_tol > 0.0) || !(abs_tol + rel_tol).is_finite() {
            return Err(NumericsError::InvalidTolerance(
                "abs_tol + rel_tol must be positive and finite".into(),
            ));
        }
        if max_iter == 0 {
            return Err(NumericsError::InvalidTolerance(
                "max_iter must be >= 1".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    /// Defaults for the simplex minimizer in `dim` dimensions: 200·d iterations,
    /// tolerance 1e-10.
    pub fn minimizer(dim: usize) -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_iter: 200 * dim.max(1),
        }
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter.max(1);
        self
    }

    /// `abs_tol + rel_tol * |scale|`
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// A search interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(NumericsError::InvalidBracket { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 0.0, 10).is_err());
        assert!(Tolerance::new(-1.0, 1.0, 10).is_err());
        assert!(Tolerance::new(1e-10, 0.0, 0).is_err());
        assert!(Tolerance::new(f64::NAN, 1.0, 3).is_err());
        let t = Tolerance::new(1e-10, 0.0, 5).unwrap();
        assert_eq!(t.bound(100.0), 1e-10);
    }

    #[test]
    fn bracket_validation() {
        assert!(Bracket::new(1.0, 1.0).is_err());
        assert!(Bracket::new(2.0, 1.0).is_err());
        assert!(Bracket::new(0.0, f64::INFINITY).is_err());
        assert_eq!(Bracket::new(-1.0, 3.0).unwrap().width(), 4.0);
    }
}
