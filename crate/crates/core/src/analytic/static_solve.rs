//! Closed-form solution of the stationary system `A y = F` for the
//! thermoelastic-string / elastic-beam pair.
//!
//! The stationary equations integrate in closed form: the flux and
//! temperature come from first integrals of the heat pair, the string
//! displacement from two more integrations, the beam displacement from four.
//! Every nested integral collapses to a single weighted integral
//! `I_m[f](x) = int_0^x (x-s)^m / m! f(s) ds` by the Cauchy repeated
//! integration formula, so profile evaluation needs only one adaptive
//! quadrature per kernel. The six integration constants are fixed by the
//! boundary and transmission conditions, eliminated in the order: the far
//! string end pins `(c1, d1)`, then the interface continuity, clamped slope
//! and force balance pin `(c2, d2, n2, m2)`.
//!
//! Serves as the independent oracle the discrete stationary solve must
//! converge to at second order.

use super::quad::adaptive_simpson;
use super::AnalyticError;
use crate::model::ValidatedParams;

const QUAD_TOL: f64 = 1e-10;

/// Right-hand-side profiles of the stationary system, in the order
/// (displacement slots `f1, f2`; velocity slots `g1, g2`; temperature slot
/// `h1`; flux slot `d1`). The pair `(f1, f2)` must satisfy the essential
/// constraints `f1(ell1) = 0`, `f2(ell2) = 0`, `f1(0) = f2(0)`,
/// `f2'(0) = 0`.
pub struct SmoothSystemData<'a> {
    pub f1: &'a dyn Fn(f64) -> f64,
    pub f2: &'a dyn Fn(f64) -> f64,
    pub g1: &'a dyn Fn(f64) -> f64,
    pub g2: &'a dyn Fn(f64) -> f64,
    pub h1: &'a dyn Fn(f64) -> f64,
    pub d1: &'a dyn Fn(f64) -> f64,
}

/// The solved stationary profiles together with their integration constants.
pub struct StaticSolution<'a> {
    p: ValidatedParams,
    data: SmoothSystemData<'a>,
    /// Temperature slope constant, `-F1(ell1)/ell1`.
    pub a1: f64,
    /// String stress constant.
    pub c1: f64,
    /// String displacement offset (scaled by `gamma1 kappa1 alpha1`).
    pub d1: f64,
    /// Beam shear constant.
    pub c2: f64,
    pub d2: f64,
    pub n2: f64,
    pub m2: f64,
}

impl<'a> StaticSolution<'a> {
    /// `I_m[f](x) = int_0^x (x-s)^m/m! f(s) ds`.
    fn kernel(
        f: &dyn Fn(f64) -> f64,
        m: u32,
        x: f64,
    ) -> Result<f64, AnalyticError> {
        let fact: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
        let integrand = move |s: f64| (x - s).powi(m as i32) / fact * f(s);
        adaptive_simpson(&integrand, 0.0, x, QUAD_TOL)
    }

    /// `F1(x) = I0[delta1 f1 - gamma1 tau1 d1](x) + I1[h1](x)`.
    fn cap_f1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        let f1 = self.data.f1;
        let d1 = self.data.d1;
        let core = move |s: f64| p.delta1 * f1(s) - p.gamma1 * p.tau1 * d1(s);
        Ok(Self::kernel(&core, 0, x)? + Self::kernel(self.data.h1, 1, x)?)
    }

    pub fn theta1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok((self.cap_f1(x)? + self.a1 * x) / (p.gamma1 * p.kappa1))
    }

    /// `theta1'`, explicit from the first integral.
    pub fn dtheta1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        let core = p.delta1 * (self.data.f1)(x) - p.gamma1 * p.tau1 * (self.data.d1)(x)
            + Self::kernel(self.data.h1, 0, x)?
            + self.a1;
        Ok(core / (p.gamma1 * p.kappa1))
    }

    pub fn q1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok(-(p.delta1 * (self.data.f1)(x) + Self::kernel(self.data.h1, 0, x)? + self.a1)
            / p.gamma1)
    }

    pub fn u1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        let gk = p.gamma1 * p.kappa1;
        // I0[F1](x) collapses to I1 and I2 kernels.
        let f1 = self.data.f1;
        let d1 = self.data.d1;
        let core = move |s: f64| p.delta1 * f1(s) - p.gamma1 * p.tau1 * d1(s);
        let int_f1 = Self::kernel(&core, 1, x)? + Self::kernel(self.data.h1, 2, x)?;
        let val = p.beta1 * int_f1
            + gk * Self::kernel(self.data.g1, 1, x)?
            + p.beta1 * self.a1 * x * x / 2.0
            + gk * self.c1 * x
            + self.d1;
        Ok(val / (gk * p.alpha1))
    }

    pub fn du1(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok((p.beta1 * self.theta1(x)? + Self::kernel(self.data.g1, 0, x)? + self.c1)
            / p.alpha1)
    }

    pub fn u2(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        let val = -Self::kernel(self.data.g2, 3, x)?
            + self.c2 * x * x * x / 6.0
            + self.d2 * x * x / 2.0
            + self.n2 * x
            + self.m2;
        Ok(val / p.alpha2)
    }

    pub fn du2(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok((-Self::kernel(self.data.g2, 2, x)?
            + self.c2 * x * x / 2.0
            + self.d2 * x
            + self.n2)
            / p.alpha2)
    }

    pub fn d2u2(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok((-Self::kernel(self.data.g2, 1, x)? + self.c2 * x + self.d2) / p.alpha2)
    }

    pub fn d3u2(&self, x: f64) -> Result<f64, AnalyticError> {
        let p = &self.p;
        Ok((-Self::kernel(self.data.g2, 0, x)? + self.c2) / p.alpha2)
    }

    /// Velocity profiles are the given displacement-slot data.
    pub fn v1(&self, x: f64) -> f64 {
        (self.data.f1)(x)
    }

    pub fn v2(&self, x: f64) -> f64 {
        (self.data.f2)(x)
    }
}

/// Solves the stationary system `A y = F` in closed form.
pub fn zero_resolvent_s1<'a>(
    p: &ValidatedParams,
    data: SmoothSystemData<'a>,
) -> Result<StaticSolution<'a>, AnalyticError> {
    let ell1 = p.ell1;
    let ell2 = p.ell2;
    let gk = p.gamma1 * p.kappa1;

    let mut sol = StaticSolution {
        p: *p,
        data,
        a1: 0.0,
        c1: 0.0,
        d1: 0.0,
        c2: 0.0,
        d2: 0.0,
        n2: 0.0,
        m2: 0.0,
    };

    // Temperature pinned at both string ends.
    let f1_ell = sol.cap_f1(ell1)?;
    sol.a1 = -f1_ell / ell1;

    // 2x2 for (c1, d1):
    //   gk*ell1 * c1 + d1 = G1
    //   -(delta1/beta1) ell2^3/3 * c1 + alpha2/(gk alpha1) * d1 = G2 - G3 ell2^2/2
    let f1 = sol.data.f1;
    let d1f = sol.data.d1;
    let core = move |s: f64| p.delta1 * f1(s) - p.gamma1 * p.tau1 * d1f(s);
    let int_f1_ell = StaticSolution::kernel(&core, 1, ell1)?
        + StaticSolution::kernel(sol.data.h1, 2, ell1)?;
    let g1_rhs = -p.beta1 * int_f1_ell - gk * StaticSolution::kernel(sol.data.g1, 1, ell1)?
        + p.beta1 * f1_ell * ell1 / 2.0;
    let gam2 = StaticSolution::kernel(sol.data.g2, 3, ell2)?;
    let gam3 = StaticSolution::kernel(sol.data.g2, 1, ell2)?;
    let a11 = gk * ell1;
    let a12 = 1.0;
    let a21 = -(p.delta1 / p.beta1) * ell2.powi(3) / 3.0;
    let a22 = p.alpha2 / (gk * p.alpha1);
    let rhs2 = gam2 - gam3 * ell2 * ell2 / 2.0;
    let det = a11 * a22 - a12 * a21;
    sol.c1 = (g1_rhs * a22 - a12 * rhs2) / det;
    sol.d1 = (a11 * rhs2 - a21 * g1_rhs) / det;

    // Remaining constants in elimination order: force balance, clamped
    // slope, far-end moment, interface continuity.
    sol.c2 = (p.delta1 / p.beta1) * sol.c1;
    sol.n2 = 0.0;
    sol.d2 = gam3 - sol.c2 * ell2;
    sol.m2 = p.alpha2 * sol.d1 / (gk * p.alpha1);

    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, MaterialParams};

    fn unit_params() -> ValidatedParams {
        let mut raw = MaterialParams::ones_pi();
        raw.ell1 = 1.0;
        raw.ell2 = 1.0;
        validate_params(raw).unwrap()
    }

    fn zero(_: f64) -> f64 {
        0.0
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let p = unit_params();
        let sol = zero_resolvent_s1(
            &p,
            SmoothSystemData {
                f1: &zero,
                f2: &zero,
                g1: &zero,
                g2: &zero,
                h1: &zero,
                d1: &zero,
            },
        )
        .unwrap();
        for x in [0.0, 0.3, 0.7, 1.0] {
            assert_eq!(sol.u1(x).unwrap(), 0.0);
            assert_eq!(sol.u2(x).unwrap(), 0.0);
            assert_eq!(sol.theta1(x).unwrap(), 0.0);
            assert_eq!(sol.q1(x).unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_beam_load_gives_quartic() {
        // g2 == 1, everything else zero, unit parameters and lengths:
        // the beam displacement is the quartic
        // u2 = -x^4/24 + c2 x^3/6 + d2 x^2/2 + m2 with c2 = 5/32,
        // d2 = 11/32, m2 = -5/32, and the string is linear through the
        // interface value.
        let p = unit_params();
        let one = |_: f64| 1.0;
        let sol = zero_resolvent_s1(
            &p,
            SmoothSystemData {
                f1: &zero,
                f2: &zero,
                g1: &zero,
                g2: &one,
                h1: &zero,
                d1: &zero,
            },
        )
        .unwrap();
        assert!((sol.c1 - 5.0 / 32.0).abs() < 1e-12);
        assert!((sol.c2 - 5.0 / 32.0).abs() < 1e-12);
        assert!((sol.d2 - 11.0 / 32.0).abs() < 1e-12);
        assert!((sol.m2 + 5.0 / 32.0).abs() < 1e-12);
        assert_eq!(sol.n2, 0.0);
        let quartic =
            |x: f64| -x.powi(4) / 24.0 + 5.0 / 32.0 * x.powi(3) / 6.0 + 11.0 / 32.0 * x * x / 2.0
                - 5.0 / 32.0;
        for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!((sol.u2(x).unwrap() - quartic(x)).abs() < 1e-10);
        }
        // -alpha2 u2'''' = g2 = 1 exactly: fourth derivative of the quartic.
        // Check via the cubic shear profile: d3u2 = (-x + c2), derivative -1.
        let d3_0 = sol.d3u2(0.0).unwrap();
        let d3_1 = sol.d3u2(1.0).unwrap();
        assert!((d3_0 - 5.0 / 32.0).abs() < 1e-10);
        assert!((d3_1 - (5.0 / 32.0 - 1.0)).abs() < 1e-10);
        // All boundary and transmission conditions.
        assert!(sol.u1(1.0).unwrap().abs() < 1e-12);
        assert!(sol.u2(1.0).unwrap().abs() < 1e-10);
        assert!(sol.d2u2(1.0).unwrap().abs() < 1e-10);
        assert!((sol.u1(0.0).unwrap() - sol.u2(0.0).unwrap()).abs() < 1e-12);
        assert!(sol.du2(0.0).unwrap().abs() < 1e-12);
        assert!(sol.theta1(0.0).unwrap().abs() < 1e-12);
        assert!(sol.theta1(1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn smooth_data_satisfies_equations_pointwise() {
        let p = unit_params();
        let f1 = |x: f64| (1.0 - x) * (std::f64::consts::PI * x).cos().powi(2) * 0.4;
        let f2 = |x: f64| 0.4 * (1.0 - x * x) * (1.0 + 0.3 * x * x);
        let g1 = |x: f64| (2.0 * x).sin() - 0.3;
        let g2 = |x: f64| x * x - 0.5;
        let h1 = |x: f64| (3.0 * x).cos();
        let d1 = |x: f64| 0.7 * x;
        // f1(0) = 0.4 = f2(0), f1(1) = 0 = f2(1), f2'(0) = 0.
        let sol = zero_resolvent_s1(
            &p,
            SmoothSystemData {
                f1: &f1,
                f2: &f2,
                g1: &g1,
                g2: &g2,
                h1: &h1,
                d1: &d1,
            },
        )
        .unwrap();

        // Five-point finite differences of the returned profiles verify the
        // stationary equations row by row.
        let fd = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| {
            (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
        };
        let h = 1e-3;
        for &x in &[0.2, 0.45, 0.8] {
            // Stress row: alpha1 u1'' - beta1 theta1' = g1.
            let du1 = |s: f64| sol.du1(s).unwrap();
            let lhs = p.alpha1 * fd(&du1, x, h) - p.beta1 * sol.dtheta1(x).unwrap();
            assert!((lhs - g1(x)).abs() < 1e-8, "stress row at {x}: {lhs}");
            // Heat row: -delta1 f1' - gamma1 q1' = h1.
            let q1 = |s: f64| sol.q1(s).unwrap();
            let lhs = -p.delta1 * fd(&f1, x, h) - p.gamma1 * fd(&q1, x, h);
            assert!((lhs - h1(x)).abs() < 1e-8, "heat row at {x}: {lhs}");
            // Flux row: -(1/tau1) q1 - (kappa1/tau1) theta1' = d1.
            let lhs = -sol.q1(x).unwrap() / p.tau1
                - p.kappa1 / p.tau1 * sol.dtheta1(x).unwrap();
            assert!((lhs - d1(x)).abs() < 1e-9, "flux row at {x}: {lhs}");
            // Beam row: -alpha2 u2'''' = g2.
            let d3 = |s: f64| sol.d3u2(s).unwrap();
            let lhs = -p.alpha2 * fd(&d3, x, h);
            assert!((lhs - g2(x)).abs() < 1e-7, "beam row at {x}: {lhs}");
        }
        // Transmission and boundary conditions.
        assert!(sol.u1(1.0).unwrap().abs() < 1e-9);
        assert!(sol.u2(1.0).unwrap().abs() < 1e-9);
        assert!(sol.d2u2(1.0).unwrap().abs() < 1e-9);
        assert!(sol.du2(0.0).unwrap().abs() < 1e-12);
        assert!((sol.u1(0.0).unwrap() - sol.u2(0.0).unwrap()).abs() < 1e-10);
        // Force balance with the energy-consistent coefficient.
        let lhs = p.alpha2 * sol.d3u2(0.0).unwrap();
        let rhs = p.delta1 / p.beta1 * p.alpha1 * sol.du1(0.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }
}
