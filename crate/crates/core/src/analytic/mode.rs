//! The interface mode system: closed-form response of the elastic-string /
//! thermoelastic-beam pair to a resonant string forcing.
//!
//! At frequency `w` (with both components of length `pi`), forcing the
//! string velocity equation with `-alpha1 sin(gamma x)`, `gamma =
//! w/sqrt(alpha1)`, yields a string displacement
//!
//! `u1 = w^{-a} ( c1 sin(gamma x) + (c2 - x/(2 gamma)) cos(gamma x) )`
//!
//! and a beam displacement spanned by `exp(+-z_k x)` over the three
//! characteristic roots. The eight coefficients `(d_k, b_k, c1, c2)` follow
//! from four interface conditions and four boundary conditions, an 8x8
//! complex solve. Columns of growing exponentials are rescaled by
//! `exp(-Re z_k pi)` so the assembly stays finite at large `w`.

use super::sextic::{characteristic_roots, CharacteristicCoefficients, CharacteristicRoots};
use super::AnalyticError;
use crate::linalg::{smallest_singular_value, BandedMatrix, Metric};
use crate::model::ValidatedParams;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// Solution of the interface mode system at one frequency.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub w: f64,
    pub gamma: f64,
    pub alpha_exponent: f64,
    /// Scaled coefficients of `exp(+z_k x)`; the true `d_k` is
    /// `d_scaled[k] * exp(-max(Re z_k, 0) pi)`.
    pub d_scaled: [Complex64; 3],
    /// Scaled coefficients of `exp(-z_k x)`; the true `b_k` is
    /// `b_scaled[k] * exp(min(Re z_k, 0) pi)`.
    pub b_scaled: [Complex64; 3],
    pub c1: Complex64,
    pub c2: Complex64,
    pub roots: CharacteristicRoots,
    /// Max relative residual of the eight conditions (row-equilibrated).
    pub residual: f64,
    /// Condition estimate of the row-equilibrated 8x8 matrix.
    pub condition: f64,
    params: ValidatedParams,
}

impl ModeSolution {
    pub fn d(&self) -> [Complex64; 3] {
        let mut out = self.d_scaled;
        for (k, v) in out.iter_mut().enumerate() {
            *v *= (-self.roots.z[k].re.max(0.0) * PI).exp();
        }
        out
    }

    pub fn b(&self) -> [Complex64; 3] {
        let mut out = self.b_scaled;
        for (k, v) in out.iter_mut().enumerate() {
            *v *= (self.roots.z[k].re.min(0.0) * PI).exp();
        }
        out
    }

    /// `|gamma c1|`, the resonance strength that grows along the
    /// near-resonant frequency sequence.
    pub fn resonance_strength(&self) -> f64 {
        (self.gamma * self.c1).norm()
    }

    fn basis_d(&self, k: usize, x: f64) -> Complex64 {
        let z = self.roots.z[k];
        (z * x - Complex64::new(z.re.max(0.0) * PI, 0.0)).exp()
    }

    fn basis_b(&self, k: usize, x: f64) -> Complex64 {
        let z = self.roots.z[k];
        (-z * x + Complex64::new(z.re.min(0.0) * PI, 0.0)).exp()
    }

    /// j-th derivative of the beam displacement.
    pub fn u2_deriv(&self, x: f64, j: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..3 {
            let z = self.roots.z[k];
            let zj = z.powu(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += self.d_scaled[k] * zj * self.basis_d(k, x)
                + self.b_scaled[k] * zj * sign * self.basis_b(k, x);
        }
        acc
    }

    pub fn u2(&self, x: f64) -> Complex64 {
        self.u2_deriv(x, 0)
    }

    pub fn u1(&self, x: f64) -> Complex64 {
        let g = self.gamma;
        let wa = self.w.powf(-self.alpha_exponent);
        (self.c1 * (g * x).sin() + (self.c2 - x / (2.0 * g)) * (g * x).cos()) * wa
    }

    pub fn du1(&self, x: f64) -> Complex64 {
        let g = self.gamma;
        let wa = self.w.powf(-self.alpha_exponent);
        (self.c1 * g * (g * x).cos() - (g * x).cos() / (2.0 * g)
            - (self.c2 - x / (2.0 * g)) * g * (g * x).sin())
            * wa
    }

    /// Temperature profile of the beam.
    pub fn theta2(&self, x: f64) -> Complex64 {
        let p = &self.params;
        let w = self.w;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..3 {
            let z2 = self.roots.x[k];
            let t = -w * w / z2 + p.alpha2 * z2;
            acc += t * (self.d_scaled[k] * self.basis_d(k, x)
                + self.b_scaled[k] * self.basis_b(k, x));
        }
        acc / p.beta2
    }

    pub fn dtheta2(&self, x: f64) -> Complex64 {
        let p = &self.params;
        let w = self.w;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..3 {
            let z = self.roots.z[k];
            let t = -w * w / z + p.alpha2 * z * z * z;
            acc += t * (self.d_scaled[k] * self.basis_d(k, x)
                - self.b_scaled[k] * self.basis_b(k, x));
        }
        acc / p.beta2
    }

    /// Heat flux from the Cattaneo relation `(i w tau2 + 1) q = -kappa2 theta_x`.
    pub fn q2(&self, x: f64) -> Complex64 {
        let p = &self.params;
        let l = Complex64::new(1.0, p.tau2 * self.w);
        -p.kappa2 * self.dtheta2(x) / l
    }

    /// Max relative residual of the string and beam mode ODEs over
    /// `n_samples` points.
    pub fn ode_residual(&self, n_samples: usize) -> f64 {
        let p = &self.params;
        let w = self.w;
        let g = self.gamma;
        let wa = w.powf(self.alpha_exponent);
        let cc = CharacteristicCoefficients::from_params(p);
        let l = cc.l(w);
        let i = Complex64::new(0.0, 1.0);
        let mut worst = 0.0f64;
        for s in 0..n_samples {
            let x = PI * (s as f64 + 0.5) / n_samples as f64;
            // String: w^a (gamma^2 u1 + u1'') = sin(gamma x).
            let u1 = self.u1(x);
            let u1xx = {
                let wai = w.powf(-self.alpha_exponent);
                (-self.c1 * g * g * (g * x).sin() + (g * x).sin()
                    - (self.c2 - x / (2.0 * g)) * g * g * (g * x).cos())
                    * wai
            };
            let lhs = wa * (g * g * u1 + u1xx);
            let rhs = Complex64::new((g * x).sin(), 0.0);
            let scale = (wa * g * g * u1.norm()).max(1.0);
            worst = worst.max((lhs - rhs).norm() / scale);
            // Beam: a u2^(6) - i w L b u2^(4) - c w^2 u2'' + i w^3 L u2 = 0.
            let u2_0 = self.u2_deriv(x, 0);
            let u2_2 = self.u2_deriv(x, 2);
            let u2_4 = self.u2_deriv(x, 4);
            let u2_6 = self.u2_deriv(x, 6);
            let t1 = cc.a * u2_6;
            let t2 = -i * w * l * cc.b * u2_4;
            let t3 = -cc.c * w * w * u2_2;
            let t4 = i * w.powi(3) * l * u2_0;
            let res = (t1 + t2 + t3 + t4).norm();
            let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(t4.norm());
            if scale > 0.0 {
                worst = worst.max(res / scale);
            }
        }
        worst
    }

    /// Energy-norm gain `||y||_H / ||f||_H` of the mode solution against the
    /// unit forcing, by composite Simpson quadrature of the closed forms.
    pub fn energy_gain(&self) -> f64 {
        let p = &self.params;
        let w = self.w;
        let dbb = p.delta2 / p.beta2;
        let wq = p.gamma2 * p.tau2 / p.kappa2;
        let n = (48.0 * self.gamma).max(4000.0) as usize;
        let n = n + n % 2;
        let h = PI / n as f64;
        let mut y2 = 0.0;
        let mut f2 = 0.0;
        for s in 0..=n {
            let x = s as f64 * h;
            let simp = if s == 0 || s == n {
                1.0
            } else if s % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let wgt = simp * h / 3.0;
            let u1 = self.u1(x).norm_sqr();
            let du1 = self.du1(x).norm_sqr();
            let u2 = self.u2(x).norm_sqr();
            let d2u2 = self.u2_deriv(x, 2).norm_sqr();
            let th = self.theta2(x).norm_sqr();
            let q = self.q2(x).norm_sqr();
            y2 += wgt
                * (p.alpha1 * du1
                    + w * w * u1
                    + dbb * (p.alpha2 * d2u2 + w * w * u2)
                    + th
                    + wq * q);
            let fv = p.alpha1 * (self.gamma * x).sin();
            f2 += wgt * fv * fv;
        }
        (y2 / f2).sqrt()
    }
}

/// Assembles and solves the 8x8 interface mode system at frequency `w`.
///
/// Requires both component lengths equal to `pi`. The force balance uses the
/// energy-consistent interface coefficient
/// `(delta2/beta2)(alpha2 u2_xxx(0) - beta2 theta2_x(0)) = alpha1 u1_x(0)`.
/// `alpha_exponent` rescales the forcing by `w^-alpha_exponent` (0 keeps the
/// plain resolvent normalization).
pub fn mode_coefficients(
    p: &ValidatedParams,
    w: f64,
    alpha_exponent: f64,
) -> Result<ModeSolution, AnalyticError> {
    if (p.ell1 - PI).abs() > 1e-12 * PI || (p.ell2 - PI).abs() > 1e-12 * PI {
        return Err(AnalyticError::InvalidInput(
            "mode system requires ell1 = ell2 = pi".into(),
        ));
    }
    if !(w > 0.0) {
        return Err(AnalyticError::InvalidInput(format!(
            "frequency must be positive, got {w}"
        )));
    }
    let cc = CharacteristicCoefficients::from_params(p);
    let roots = characteristic_roots(&cc, w)?;
    let gamma = w / p.alpha1.sqrt();
    let wa_inv = w.powf(-alpha_exponent);
    let zero = Complex64::new(0.0, 0.0);

    // Column order: d~_1..3, b~_1..3, c1, c2. Scaled exponential bases.
    let ed = |k: usize, x: f64| {
        let z = roots.z[k];
        (z * x - Complex64::new(z.re.max(0.0) * PI, 0.0)).exp()
    };
    let eb = |k: usize, x: f64| {
        let z = roots.z[k];
        (-z * x + Complex64::new(z.re.min(0.0) * PI, 0.0)).exp()
    };
    let t_of = |k: usize| -w * w / roots.x[k] + p.alpha2 * roots.x[k];

    let mut rows: Vec<[Complex64; 8]> = vec![[zero; 8]; 8];
    let mut rhs = [zero; 8];
    for k in 0..3 {
        let z = roots.z[k];
        // continuity of displacement at the interface
        rows[0][k] = ed(k, 0.0);
        rows[0][3 + k] = eb(k, 0.0);
        // clamped beam slope at the interface
        rows[1][k] = z * ed(k, 0.0);
        rows[1][3 + k] = -z * eb(k, 0.0);
        // interface force balance
        let fb = p.delta2 / p.beta2 * w * w / z;
        rows[2][k] = fb * ed(k, 0.0);
        rows[2][3 + k] = -fb * eb(k, 0.0);
        // temperature pinned at the interface
        rows[3][k] = t_of(k) * ed(k, 0.0);
        rows[3][3 + k] = t_of(k) * eb(k, 0.0);
        // far end of the beam: displacement, bending moment, temperature
        rows[4][k] = ed(k, PI);
        rows[4][3 + k] = eb(k, PI);
        rows[5][k] = roots.x[k] * ed(k, PI);
        rows[5][3 + k] = roots.x[k] * eb(k, PI);
        rows[6][k] = ed(k, PI) / roots.x[k];
        rows[6][3 + k] = eb(k, PI) / roots.x[k];
    }
    rows[0][7] = Complex64::new(-wa_inv, 0.0);
    rows[2][6] = Complex64::new(-p.alpha1 * gamma * wa_inv, 0.0);
    rhs[2] = Complex64::new(-p.alpha1 / (2.0 * gamma) * wa_inv, 0.0);
    // far end of the string
    rows[7][6] = Complex64::new((gamma * PI).sin(), 0.0);
    rows[7][7] = Complex64::new((gamma * PI).cos(), 0.0);
    rhs[7] = Complex64::new(PI / (2.0 * gamma) * (gamma * PI).cos(), 0.0);

    // Row equilibration keeps the condition estimate meaningful across the
    // wildly different row scales.
    for r in 0..8 {
        let mx = rows[r]
            .iter()
            .map(|v| v.norm())
            .fold(rhs[r].norm(), f64::max);
        if mx > 0.0 {
            for v in rows[r].iter_mut() {
                *v /= mx;
            }
            rhs[r] /= mx;
        }
    }

    let mut triplets = Vec::with_capacity(64);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            triplets.push((r, c, v));
        }
    }
    let mat = BandedMatrix::from_triplets(8, 8, &triplets);
    let lu = mat
        .lu()
        .map_err(|_| AnalyticError::NearSingularModeSystem { cond: f64::INFINITY })?;
    let x = lu.solve(&rhs).expect("8x8 solve");

    // Condition estimate: power iteration for the largest singular value,
    // inverse iteration (via the LU) for the smallest.
    let metric = Metric::identity(8);
    let sigma_max = {
        let d = mat.to_dense();
        let mut v: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64))
            .collect();
        let mut s = 0.0;
        for _ in 0..40 {
            let av = mat.matvec(&v);
            let mut atav = vec![zero; 8];
            for i in 0..8 {
                for j in 0..8 {
                    atav[j] += d[i][j].conj() * av[i];
                }
            }
            let nrm = atav.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            s = nrm.sqrt();
            if nrm > 0.0 {
                for (vi, ai) in v.iter_mut().zip(&atav) {
                    *vi = ai / nrm;
                }
            }
        }
        s
    };
    let sigma_min = smallest_singular_value(
        &|v| mat.matvec(v),
        &|v| lu.solve(v).unwrap(),
        &|v| lu.solve_conj_transpose(v).unwrap(),
        &metric,
        1e-10,
        200,
        0x6d0de,
    )
    .map(|(s, _)| s)
    .unwrap_or(0.0);
    let condition = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    if condition > 1e12 {
        return Err(AnalyticError::NearSingularModeSystem { cond: condition });
    }

    // Relative residual of the equilibrated system.
    let mut residual = 0.0f64;
    for r in 0..8 {
        let mut acc = zero;
        let mut scale = rhs[r].norm();
        for c in 0..8 {
            let term = rows[r][c] * x[c];
            acc += term;
            scale += term.norm();
        }
        residual = residual.max((acc - rhs[r]).norm() / scale.max(f64::MIN_POSITIVE));
    }

    Ok(ModeSolution {
        w,
        gamma,
        alpha_exponent,
        d_scaled: [x[0], x[1], x[2]],
        b_scaled: [x[3], x[4], x[5]],
        c1: x[6],
        c2: x[7],
        roots,
        residual,
        condition,
        params: *p,
    })
}

/// CSV rows `w,gain,cond` for a probe table computed from mode solutions.
pub fn mode_gain_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("w,gain,cond\n");
    for &(w, gain, cond) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            crate::fmt_sig17(w),
            crate::fmt_sig17(gain),
            crate::fmt_sig17(cond)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::resonance_frequencies;
    use crate::model::{validate_params, MaterialParams};

    fn params() -> ValidatedParams {
        validate_params(MaterialParams::ones_pi()).unwrap()
    }

    #[test]
    fn generic_frequency_solves_cleanly() {
        let p = params();
        // Away from the near-resonant sequence.
        let sol = mode_coefficients(&p, 17.77, 0.0).unwrap();
        assert!(sol.residual < 1e-8, "residual {}", sol.residual);
        assert!(sol.condition < 1e10, "condition {}", sol.condition);
        assert!(sol.ode_residual(64) < 1e-6);
        // Interface continuity: u1(0) = u2(0).
        assert!((sol.u1(0.0) - sol.u2(0.0)).norm() < 1e-8 * sol.u2(0.0).norm().max(1e-12));
        // Beam slope vanishes at the interface, bending moment at the far end.
        assert!(sol.u2_deriv(0.0, 1).norm() < 1e-8 * (sol.u2(0.0).norm() + 1.0));
        assert!(sol.theta2(PI).norm() < 1e-6 * (sol.theta2(PI / 2.0).norm() + 1e-12));
    }

    #[test]
    fn large_frequency_stays_finite() {
        let p = params();
        let seq = resonance_frequencies(&p, 6).unwrap();
        let w = *seq.ws.last().unwrap();
        assert!(w > 1e5, "sequence should reach large frequencies, got {w}");
        let sol = mode_coefficients(&p, w, 0.0).unwrap();
        assert!(sol.residual.is_finite() && sol.residual < 1e-8);
        assert!(sol.resonance_strength().is_finite());
    }

    #[test]
    fn resonance_strength_grows_along_sequence() {
        let p = params();
        let seq = resonance_frequencies(&p, 4).unwrap();
        let strengths: Vec<f64> = seq
            .ws
            .iter()
            .map(|&w| mode_coefficients(&p, w, 0.0).unwrap().resonance_strength())
            .collect();
        assert!(
            strengths.windows(2).all(|s| s[1] > s[0]),
            "not increasing: {strengths:?}"
        );
    }

    #[test]
    fn energy_gain_positive_and_finite() {
        let p = params();
        let sol = mode_coefficients(&p, 36.0, 0.0).unwrap();
        let g = sol.energy_gain();
        assert!(g.is_finite() && g > 0.0);
    }

    #[test]
    fn wrong_lengths_rejected() {
        let mut raw = MaterialParams::ones_pi();
        raw.ell1 = 1.0;
        let p = validate_params(raw).unwrap();
        assert!(matches!(
            mode_coefficients(&p, 10.0, 0.0),
            Err(AnalyticError::InvalidInput(_))
        ));
    }
}
