//! Shift-invert eigenvalue iteration with deflation.

use super::metric::Metric;
use super::{LinalgError, SeedStream};
use num_complex::Complex64;

/// A converged eigenpair. The eigenvalue is the Rayleigh quotient of the
/// converged vector in the supplied metric, the residual is
/// `||A x - lambda x||_M / ||x||_M`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub residual: f64,
    pub vector: Vec<Complex64>,
}

struct Deflator {
    mu: Complex64,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
    denom: Complex64,
}

fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // a^H b
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn euclid_normalize(x: &mut [Complex64]) {
    let n: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        let inv = 1.0 / n;
        for v in x.iter_mut() {
            *v = v.scale(inv);
        }
    }
}

/// Up to `k` eigenvalues of `A` nearest `shift`, by power iteration on the
/// shift-inverted operator with Hotelling deflation of converged pairs.
///
/// `solve_shifted` applies `(A - shift I)^{-1}`, `solve_shifted_h` its
/// conjugate transpose (both available from one banded LU). Deflation uses
/// left eigenvectors obtained from the adjoint iteration, so it is exact for
/// simple eigenvalues. Pairs closer than `1e-8 * |lambda|` to an already
/// converged eigenvalue are treated as duplicates and the search stops early.
///
/// Errors with `NoConvergence` only if not a single pair converges.
pub fn shift_invert_eigs(
    shift: Complex64,
    k: usize,
    apply_a: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    solve_shifted: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    solve_shifted_h: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    metric: &Metric,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<Vec<EigenPair>, LinalgError> {
    let n = metric.dim();
    let mut deflators: Vec<Deflator> = Vec::new();
    let mut out: Vec<EigenPair> = Vec::new();

    'pairs: for j in 0..k {
        let mut converged: Option<(Complex64, Vec<Complex64>, Complex64)> = None;
        'attempts: for attempt in 0..3u64 {
            let mut stream = SeedStream::new(
                seed ^ (j as u64).wrapping_mul(0x9e3779b97f4a7c15)
                    ^ attempt.wrapping_mul(0x1000_0001b3),
            );
            let mut x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(stream.next_f64(), stream.next_f64()))
                .collect();
            euclid_normalize(&mut x);
            let mut mu_old = Complex64::new(0.0, 0.0);
            for it in 0..max_iter {
                let mut y = solve_shifted(&x);
                for d in &deflators {
                    let c = d.mu * dot_h(&d.left, &x) / d.denom;
                    for (yv, rv) in y.iter_mut().zip(&d.right) {
                        *yv -= c * rv;
                    }
                }
                let mu = dot_h(&x, &y);
                euclid_normalize(&mut y);
                x = y;
                let settled = (mu - mu_old).norm() <= 1e-3 * mu.norm().max(f64::MIN_POSITIVE);
                mu_old = mu;
                if settled || it == max_iter - 1 {
                    // Rayleigh quotient in the metric and residual check.
                    let ax = apply_a(&x);
                    let xn2 = metric.inner(&x, &x).re;
                    let lambda = metric.inner(&ax, &x) / xn2;
                    let mut res_vec = ax;
                    for (rv, xv) in res_vec.iter_mut().zip(&x) {
                        *rv -= lambda * xv;
                    }
                    let res = metric.norm(&res_vec) / xn2.sqrt();
                    if res <= tol {
                        converged = Some((lambda, x, mu));
                        break 'attempts;
                    }
                }
            }
        }

        let (lambda, x, mu) = match converged {
            Some(c) => c,
            None => break 'pairs,
        };

        // Duplicate of an earlier pair means the deflation has been
        // exhausted near this shift; stop rather than loop.
        if out
            .iter()
            .any(|p| (p.value - lambda).norm() <= 1e-8 * lambda.norm().max(1e-300))
        {
            break 'pairs;
        }

        // Left eigenvector of the shift-inverted operator for the same mu,
        // from the adjoint iteration with conjugate deflation.
        let mut w: Vec<Complex64> = {
            let mut stream = SeedStream::new(seed ^ 0xabcd ^ (j as u64) << 17);
            (0..n)
                .map(|_| Complex64::new(stream.next_f64(), stream.next_f64()))
                .collect()
        };
        euclid_normalize(&mut w);
        let mut nu_old = Complex64::new(0.0, 0.0);
        for _ in 0..max_iter {
            let mut z = solve_shifted_h(&w);
            for d in &deflators {
                let c = d.mu.conj() * dot_h(&d.right, &w) / d.denom.conj();
                for (zv, lv) in z.iter_mut().zip(&d.left) {
                    *zv -= c * lv;
                }
            }
            let nu = dot_h(&w, &z);
            euclid_normalize(&mut z);
            w = z;
            if (nu - nu_old).norm() <= 1e-10 * nu.norm().max(f64::MIN_POSITIVE) {
                break;
            }
            nu_old = nu;
        }

        let denom = dot_h(&w, &x);
        // A degenerate left/right pairing would poison the deflation.
        if denom.norm() > 1e-12 {
            deflators.push(Deflator {
                mu,
                right: x.clone(),
                left: w,
                denom,
            });
        }

        let ax = apply_a(&x);
        let xn = metric.norm(&x);
        let mut res_vec = ax;
        for (rv, xv) in res_vec.iter_mut().zip(&x) {
            *rv -= lambda * xv;
        }
        let residual = metric.norm(&res_vec) / xn;
        out.push(EigenPair {
            value: lambda,
            residual,
            vector: x,
        });
    }

    if out.is_empty() {
        return Err(LinalgError::NoConvergence(format!(
            "shift-invert iteration at shift {shift}"
        )));
    }
    Ok(out)
}
