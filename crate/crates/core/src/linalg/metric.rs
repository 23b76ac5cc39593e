//! Inner-product weights for the energy norm.

use super::banded::{BandedMatrix, LuFactors, Scalar};
use super::LinalgError;
use num_complex::Complex64;

/// A symmetric positive definite Gram matrix defining the inner product in
/// which operator norms, residuals and Rayleigh quotients are measured.
///
/// The identity variant covers plain Euclidean problems; the banded variant
/// carries the assembled energy Gram matrix together with its LU factors so
/// that both `M x` and `M^{-1} x` are cheap.
pub enum Metric {
    Identity(usize),
    Banded {
        gram: BandedMatrix<f64>,
        factors: LuFactors<f64>,
    },
}

impl Metric {
    pub fn identity(n: usize) -> Self {
        Metric::Identity(n)
    }

    pub fn banded(gram: BandedMatrix<f64>) -> Result<Self, LinalgError> {
        let factors = gram.lu()?;
        Ok(Metric::Banded { gram, factors })
    }

    pub fn dim(&self) -> usize {
        match self {
            Metric::Identity(n) => *n,
            Metric::Banded { gram, .. } => gram.rows(),
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            Metric::Identity(_) => x.to_vec(),
            Metric::Banded { gram, .. } => gram.matvec_complex(x),
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        match self {
            Metric::Identity(_) => b.to_vec(),
            Metric::Banded { factors, .. } => {
                // Real factors, complex right-hand side: solve the real and
                // imaginary parts separately.
                let re: Vec<f64> = b.iter().map(|z| z.re).collect();
                let im: Vec<f64> = b.iter().map(|z| z.im).collect();
                let xr = factors.solve(&re).expect("metric solve");
                let xi = factors.solve(&im).expect("metric solve");
                xr.into_iter()
                    .zip(xi)
                    .map(|(r, i)| Complex64::new(r, i))
                    .collect()
            }
        }
    }

    /// `<x, y>_M = y^H M x`.
    pub fn inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mx = self.apply(x);
        mx.iter()
            .zip(y)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm(&self, x: &[Complex64]) -> f64 {
        let v = self.inner(x, x).re;
        // Guard tiny negative round-off.
        v.max(0.0).sqrt()
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Metric::Identity(_) => x.to_vec(),
            Metric::Banded { gram, .. } => gram.matvec(x),
        }
    }

    pub fn inner_real(&self, x: &[f64], y: &[f64]) -> f64 {
        let mx = self.apply_real(x);
        mx.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn norm_real(&self, x: &[f64]) -> f64 {
        self.inner_real(x, x).max(0.0).sqrt()
    }
}

/// M-normalizes a complex vector in place; returns the original norm.
pub(crate) fn normalize_in(metric: &Metric, x: &mut [Complex64]) -> f64 {
    let n = metric.norm(x);
    if n > 0.0 {
        let inv = 1.0 / n;
        for v in x.iter_mut() {
            *v = v.scale(inv);
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_metric_is_euclidean() {
        let m = Metric::identity(2);
        let x = [Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)];
        assert!((m.norm(&x) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn banded_metric_solve_inverts_apply() {
        let gram = BandedMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 2.0),
                (1, 1, 3.0),
                (2, 2, 4.0),
                (0, 1, 0.5),
                (1, 0, 0.5),
            ],
        );
        let m = Metric::banded(gram).unwrap();
        let x = vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(-0.5, 3.0),
        ];
        let back = m.solve(&m.apply(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
