//! Closed-form constructions used as independent oracles.
//!
//! Nothing here touches the discretization: the static solve integrates the
//! stationary system in quadrature form, the characteristic roots come from
//! Cardano's formula on the depressed cubic, the near-resonant frequency
//! sequence from continued-fraction rational approximation, and the
//! interface mode system from an explicit 8x8 solve. The spectral module
//! checks its discrete results against these.

mod cubic;
mod mode;
mod quad;
mod rational;
mod sextic;
mod static_solve;

pub use cubic::cubic_roots_cardano;
pub use mode::{mode_coefficients, mode_gain_csv, ModeSolution};
pub use quad::adaptive_simpson;
pub use rational::{
    dirichlet_sequence, resonance_frequencies, DirichletApprox, FrequencySequence,
};
pub use sextic::{
    characteristic_roots, roots_csv, verify_root_asymptotics, AsymptoticsRow,
    CharacteristicCoefficients, CharacteristicRoots,
};
pub use static_solve::{zero_resolvent_s1, SmoothSystemData, StaticSolution};

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticError {
    InvalidInput(String),
    /// The depressed cubic has a vanishing discriminant at this frequency;
    /// reported rather than silently perturbed.
    DegenerateDiscriminant { w: f64 },
    /// The interface mode system is numerically singular (condition number
    /// beyond 1e12), which happens exactly at a resonance.
    NearSingularModeSystem { cond: f64 },
    QuadratureFailure { interval: (f64, f64) },
}

impl fmt::Display for AnalyticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            AnalyticError::DegenerateDiscriminant { w } => {
                write!(f, "degenerate cubic discriminant at w = {w}")
            }
            AnalyticError::NearSingularModeSystem { cond } => {
                write!(f, "mode system is near-singular (condition {cond:.3e})")
            }
            AnalyticError::QuadratureFailure { interval } => {
                write!(
                    f,
                    "adaptive quadrature failed on [{}, {}]",
                    interval.0, interval.1
                )
            }
        }
    }
}

impl std::error::Error for AnalyticError {}
