//! Free-energy minimization for the Peierls model of dimerized atomic rings
//! at positive temperature.
//!
//! The crate covers finite even rings (exact matrix model, the two-parameter
//! dimer reduction and its Euler–Lagrange critical point), the infinite-chain
//! limit (critical temperature, large-stiffness constants and the square-root
//! bifurcation of the dimerization amplitude) and the zero-temperature energy
//! gain of the dimerized state.

pub mod dimer;
pub mod error;
pub mod finite_chain;
pub mod kernels;
pub mod numerics;
pub mod thermodynamic;
pub mod zero_temperature;

pub use dimer::{DimerState, Sign};
pub use error::{Error, Result};
pub use finite_chain::{CriticalPoint, HoppingConfig, ModelParams};
pub use thermodynamic::{AsymptoticConstants, BifurcationData};
pub use zero_temperature::GapResult;
