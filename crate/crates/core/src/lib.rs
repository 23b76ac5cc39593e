//! Numerical laboratory for one-dimensional thermoelastic string/beam
//! transmission structures in which exactly one component is damped by
//! second-sound (Cattaneo) heat conduction.
//!
//! The crate provides:
//!
//! - [`model`]: physical parameters, system selection, energy weights;
//! - [`disc`]: a mimetic finite-difference generator whose discrete energy
//!   balance reproduces the continuous dissipation identity to machine
//!   precision;
//! - [`evolution`]: implicit-midpoint time stepping with exact per-step
//!   energy accounting and decay-law fitting;
//! - [`spectral`]: resolvent-norm scans along the imaginary axis, eigenvalue
//!   branches by shift-invert iteration, spectral-abscissa studies, and a
//!   resolvent-growth probe driven by near-resonant forcing;
//! - [`analytic`]: closed-form constructions used as independent oracles
//!   (a zero-frequency static solve, Cardano roots of the characteristic
//!   sextic, continued-fraction rational approximants, and the interface
//!   mode system);
//! - [`linalg`]: self-contained banded LU with partial pivoting, smallest
//!   singular value estimation, shift-invert eigeniteration, least squares.

pub mod analytic;
pub mod disc;
pub mod evolution;
pub mod linalg;
pub mod model;
pub mod spectral;

pub use disc::{assemble_generator, build_grids, BlockGenerator, Coupling, Grid1D, StateVector};
pub use model::{validate_params, MaterialParams, SystemKind, ValidatedParams};

/// Formats a float with 17 significant digits, the fixed width used by all
/// CSV artifacts so that identical runs are byte-identical and diffable.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}
