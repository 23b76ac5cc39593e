//! Cardano's formula for the depressed complex cubic.

use num_complex::Complex64;

/// Roots of `s^3 + p s + q = 0`.
///
/// `u0` is the principal cube root of `(-q + delta)/2` with
/// `delta = sqrt(q^2 + 4 p^3 / 27)`; the partner is taken as
/// `v0 = -p / (3 u0)` rather than an independent cube root, which enforces
/// the pairing constraint `u0 v0 = -p/3` deterministically (multiple roots,
/// where the discriminant vanishes, fall out with `v0 = u0`). The remaining
/// roots rotate `u0`, `v0` by the primitive cube roots of unity.
pub fn cubic_roots_cardano(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let disc = q * q + p * p * p * (4.0 / 27.0);
    let delta = disc.sqrt();
    let u_cubed = 0.5 * (-q + delta);
    let (u0, v0) = if u_cubed.norm() > 0.0 {
        let u0 = u_cubed.cbrt();
        (u0, -p / (3.0 * u0))
    } else {
        // u0^3 = 0 forces p = 0 (since delta = +-q); the cubic is s^3 = -q.
        (Complex64::new(0.0, 0.0), (0.5 * (-q - delta)).cbrt())
    };
    let j = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let j2 = j * j;
    [u0 + v0, j * u0 + j2 * v0, j2 * u0 + j * v0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(p: Complex64, q: Complex64, s: Complex64) -> f64 {
        (s * s * s + p * s + q).norm()
    }

    fn assert_multiset_eq(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) {
        let key = |z: &Complex64| (z.re, z.im);
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < tol, "{g} vs {w}");
        }
    }

    #[test]
    fn zero_cubic() {
        let r = cubic_roots_cardano(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for s in r {
            assert_eq!(s.norm(), 0.0);
        }
    }

    #[test]
    fn three_real_roots() {
        // s^3 - s = s(s-1)(s+1)
        let r = cubic_roots_cardano(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_multiset_eq(
            r.to_vec(),
            vec![
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            1e-12,
        );
    }

    #[test]
    fn double_root() {
        // s^3 - 3s + 2 = (s-1)^2 (s+2)
        let r = cubic_roots_cardano(Complex64::new(-3.0, 0.0), Complex64::new(2.0, 0.0));
        assert_multiset_eq(
            r.to_vec(),
            vec![
                Complex64::new(-2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            1e-7,
        );
    }

    #[test]
    fn residual_and_vieta_on_random_complex_cubics() {
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..200 {
            let scale = 10f64.powf(3.0 * next());
            let p = Complex64::new(next(), next()) * scale;
            let q = Complex64::new(next(), next()) * scale;
            let r = cubic_roots_cardano(p, q);
            let bound = 1e-12 * p.norm().max(q.norm()).max(1.0).powf(1.5);
            for s in r {
                assert!(residual(p, q, s) < bound, "residual {}", residual(p, q, s));
            }
            // Vieta: sum 0, pairwise sum p, product -q (to 1e-10 relative).
            let sum = r[0] + r[1] + r[2];
            let pair = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
            let prod = r[0] * r[1] * r[2];
            let rmax = r.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            assert!(sum.norm() <= 1e-10 * rmax);
            assert!((pair - p).norm() <= 1e-10 * rmax * rmax);
            assert!((prod + q).norm() <= 1e-10 * rmax * rmax * rmax);
        }
    }
}
