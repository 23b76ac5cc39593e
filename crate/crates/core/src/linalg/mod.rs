//! Self-contained banded linear algebra.
//!
//! Everything the higher modules need reduces to banded LU solves: the
//! factorization here supports real and complex scalars, partial pivoting,
//! and conjugate-transpose solves with the same factors. On top of it sit a
//! smallest-singular-value estimator (inverse iteration on the weighted
//! normal equations), a shift-invert eigensolver with deflation, and
//! ordinary least squares for the decay/growth fits.

mod banded;
mod eigs;
mod fit;
mod metric;
mod sigma;

pub use banded::{BandedMatrix, LuFactors, Scalar};
pub use eigs::{shift_invert_eigs, EigenPair};
pub use fit::{fit_line, LineFit};
pub use metric::Metric;
pub use sigma::smallest_singular_value;

use std::fmt;

/// Errors produced by the banded solvers and iterations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    NotSquare,
    /// A pivot fell below the hard floor (1e-300); the matrix is numerically
    /// singular.
    SingularMatrix,
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    /// An iteration failed to reach its tolerance; the payload names the
    /// computation.
    NoConvergence(String),
    /// Not enough distinct abscissae for a least-squares line.
    DegenerateData,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotSquare => write!(f, "matrix is not square"),
            LinalgError::SingularMatrix => write!(f, "matrix is numerically singular"),
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::NoConvergence(what) => write!(f, "iteration did not converge: {what}"),
            LinalgError::DegenerateData => write!(f, "need at least two distinct abscissae"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// Deterministic start vectors for the iterative routines. The stream is a
/// small xorshift seeded from problem data so that identical inputs produce
/// identical iterates regardless of thread count.
pub(crate) struct SeedStream(u64);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        // Avoid the all-zero fixed point.
        SeedStream(seed ^ 0x9e37_79b9_7f4a_7c15)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in (-1, 1).
    pub fn next_f64(&mut self) -> f64 {
        let x = self.next_u64() >> 11;
        2.0 * (x as f64) / ((1u64 << 53) as f64) - 1.0
    }
}
