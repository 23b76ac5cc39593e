//! Characteristic sextic of the thermoelastic beam mode equation.
//!
//! Eliminating the temperature and flux from the beam system at frequency
//! `w` leaves a sixth-order ODE for the displacement whose characteristic
//! equation is
//!
//! `a z^6 - i w L b z^4 - c w^2 z^2 + i w^3 L = 0`,  `L = i tau2 w + 1`,
//!
//! with `a = alpha2 kappa2 gamma2`, `b = alpha2 + delta2 beta2`,
//! `c = gamma2 kappa2`. Substituting `X = z^2` gives a cubic solved by
//! Cardano's formula after depressing the quadratic term; the six roots are
//! `+-z_1, +-z_2, +-z_3` labelled by their large-`w` asymptotes
//!
//! `z_1 ~ b^(-1/4) sqrt(w)`, `z_2 ~ i b^(-1/4) sqrt(w)`,
//! `z_3 ~ i sqrt(b tau2 / a) w (1 - i/(2 tau2 w))`.

use super::cubic::cubic_roots_cardano;
use super::AnalyticError;
use crate::model::ValidatedParams;
use num_complex::Complex64;

/// Coefficient bundle of the characteristic equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `2 b^3 / (27 a^3)`
    pub m: f64,
    /// `M` with `M^2 = 4 b^3 / (27 a^4) = 2 m / a`
    pub big_m: f64,
    pub tau2: f64,
}

impl CharacteristicCoefficients {
    pub fn from_params(p: &ValidatedParams) -> Self {
        let a = p.alpha2 * p.kappa2 * p.gamma2;
        let b = p.alpha2 + p.delta2 * p.beta2;
        let c = p.gamma2 * p.kappa2;
        let m = 2.0 * b.powi(3) / (27.0 * a.powi(3));
        let big_m = (4.0 * b.powi(3) / (27.0 * a.powi(4))).sqrt();
        CharacteristicCoefficients {
            a,
            b,
            c,
            m,
            big_m,
            tau2: p.tau2,
        }
    }

    /// `L(w) = i tau2 w + 1`.
    pub fn l(&self, w: f64) -> Complex64 {
        Complex64::new(1.0, self.tau2 * w)
    }

    /// Value of the sextic at `z`.
    pub fn sextic(&self, w: f64, z: Complex64) -> Complex64 {
        let l = self.l(w);
        let i = Complex64::new(0.0, 1.0);
        let z2 = z * z;
        let z4 = z2 * z2;
        self.a * z4 * z2 - i * w * l * self.b * z4 - self.c * w * w * z2
            + i * w.powi(3) * l
    }

    /// Relative residual of `z` in the sextic, scaled by the largest term.
    pub fn sextic_residual(&self, w: f64, z: Complex64) -> f64 {
        let l = self.l(w);
        let z2 = z * z;
        let z4 = z2 * z2;
        let scale = (self.a * (z4 * z2).norm())
            .max((w * l.norm()) * self.b * z4.norm())
            .max(self.c * w * w * z2.norm())
            .max(w.powi(3) * l.norm());
        self.sextic(w, z).norm() / scale.max(f64::MIN_POSITIVE)
    }

    /// Large-`w` asymptotes of the three labelled roots.
    pub fn asymptotes(&self, w: f64) -> [Complex64; 3] {
        let i = Complex64::new(0.0, 1.0);
        let lead = self.b.powf(-0.25) * w.sqrt();
        let z3 = i * (self.b * self.tau2 / self.a).sqrt()
            * w
            * (Complex64::new(1.0, 0.0) - i / (2.0 * self.tau2 * w));
        [Complex64::new(lead, 0.0), i * lead, z3]
    }
}

/// The six roots `+-z_k` with the intermediate Cardano quantities.
#[derive(Debug, Clone)]
pub struct CharacteristicRoots {
    pub w: f64,
    pub z: [Complex64; 3],
    /// Squared roots, i.e. the roots of the cubic in `X = z^2`.
    pub x: [Complex64; 3],
    /// Roots of the depressed cubic.
    pub s: [Complex64; 3],
    pub p: Complex64,
    pub q: Complex64,
    /// Discriminant `q^2 + 4 p^3/27`.
    pub discriminant: Complex64,
    /// Largest relative sextic residual over the six roots.
    pub max_residual: f64,
}

impl CharacteristicRoots {
    /// Cyclic combination `sum_k z_k^{-2} (z_{k+1}^2 - z_{k+2}^2)`; nonzero
    /// whenever the roots are simple.
    pub fn cyclic_p(&self) -> Complex64 {
        let x = &self.x;
        x[0].inv() * (x[1] - x[2]) + x[1].inv() * (x[2] - x[0]) + x[2].inv() * (x[0] - x[1])
    }
}

/// Solves the characteristic sextic at frequency `w > 0`.
///
/// The cubic in `X = z^2` is depressed and solved by Cardano; square roots
/// are taken with `Re z >= 0` for the real-leading root and `Im z >= 0` for
/// the imaginary-leading roots, and labels are assigned by nearest-asymptote
/// matching with ties broken by ascending modulus.
pub fn characteristic_roots(
    cc: &CharacteristicCoefficients,
    w: f64,
) -> Result<CharacteristicRoots, AnalyticError> {
    if !(w > 0.0) {
        return Err(AnalyticError::InvalidInput(format!(
            "frequency must be positive, got {w}"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let l = cc.l(w);
    // Monic cubic X^3 + a2 X^2 + a1 X + a0.
    let a2 = -i * w * l * cc.b / cc.a;
    let a1 = Complex64::new(-cc.c * w * w / cc.a, 0.0);
    let a0 = i * w.powi(3) * l / cc.a;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let discriminant = q * q + p * p * p * (4.0 / 27.0);
    let scale = q.norm().powi(2).max(p.norm().powi(3) * 4.0 / 27.0);
    if discriminant.norm() <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
        return Err(AnalyticError::DegenerateDiscriminant { w });
    }
    let s = cubic_roots_cardano(p, q);
    let shift = -a2 / 3.0;
    let x = [s[0] + shift, s[1] + shift, s[2] + shift];

    // Branch rules per label position.
    let branch = |z: Complex64, label: usize| -> Complex64 {
        let keep = if label == 0 {
            z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0)
        } else {
            z.im > 0.0 || (z.im == 0.0 && z.re >= 0.0)
        };
        if keep {
            z
        } else {
            -z
        }
    };

    let asym = cc.asymptotes(w);
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best: Option<([Complex64; 3], [Complex64; 3], f64)> = None;
    for perm in perms {
        let mut z = [Complex64::new(0.0, 0.0); 3];
        let mut xs = [Complex64::new(0.0, 0.0); 3];
        let mut cost = 0.0;
        for (label, &src) in perm.iter().enumerate() {
            let zk = branch(x[src].sqrt(), label);
            z[label] = zk;
            xs[label] = x[src];
            cost += (zk - asym[label]).norm() / asym[label].norm();
        }
        let better = match &best {
            None => true,
            Some((zb, _, cb)) => {
                cost < *cb - 1e-12 * cb.abs()
                    || ((cost - cb).abs() <= 1e-12 * cb.abs()
                        && z.iter().map(|v| v.norm()).sum::<f64>()
                            < zb.iter().map(|v| v.norm()).sum::<f64>())
            }
        };
        if better {
            best = Some((z, xs, cost));
        }
    }
    let (z, x, _) = best.unwrap();

    let mut max_residual = 0.0f64;
    for zk in z {
        max_residual = max_residual.max(cc.sextic_residual(w, zk));
        max_residual = max_residual.max(cc.sextic_residual(w, -zk));
    }

    Ok(CharacteristicRoots {
        w,
        z,
        x,
        s,
        p,
        q,
        discriminant,
        max_residual,
    })
}

/// One row of the asymptote-deviation table: relative deviations of
/// `z_1/(b^{-1/4} sqrt(w))`, `z_2/(i b^{-1/4} sqrt(w))` and
/// `z_3/(i sqrt(b tau2/a) w)` from 1.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticsRow {
    pub w: f64,
    pub deviations: [f64; 3],
}

/// Deviations of the computed roots from their leading-order asymptotes over
/// an increasing frequency list spanning at least two decades.
pub fn verify_root_asymptotics(
    cc: &CharacteristicCoefficients,
    w_list: &[f64],
) -> Result<Vec<AsymptoticsRow>, AnalyticError> {
    if w_list.len() < 3 {
        return Err(AnalyticError::InvalidInput(
            "need at least three frequencies".into(),
        ));
    }
    if !w_list.windows(2).all(|p| p[1] > p[0]) {
        return Err(AnalyticError::InvalidInput(
            "frequency list must be increasing".into(),
        ));
    }
    if w_list[w_list.len() - 1] / w_list[0] < 100.0 {
        return Err(AnalyticError::InvalidInput(
            "frequency list must span at least two decades".into(),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut rows = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let r = characteristic_roots(cc, w)?;
        let lead = cc.b.powf(-0.25) * w.sqrt();
        // Leading-order references only; the z3 correction is what the
        // deviation column is expected to reveal as O(1/w).
        let refs = [
            Complex64::new(lead, 0.0),
            i * lead,
            i * (cc.b * cc.tau2 / cc.a).sqrt() * w,
        ];
        let deviations = [
            (r.z[0] / refs[0] - 1.0).norm(),
            (r.z[1] / refs[1] - 1.0).norm(),
            (r.z[2] / refs[2] - 1.0).norm(),
        ];
        rows.push(AsymptoticsRow { w, deviations });
    }
    Ok(rows)
}

/// CSV rows `w,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3,residual`.
pub fn roots_csv(rows: &[CharacteristicRoots]) -> String {
    let mut out = String::from("w,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3,residual\n");
    for r in rows {
        out.push_str(&crate::fmt_sig17(r.w));
        for z in r.z {
            out.push(',');
            out.push_str(&crate::fmt_sig17(z.re));
            out.push(',');
            out.push_str(&crate::fmt_sig17(z.im));
        }
        out.push(',');
        out.push_str(&crate::fmt_sig17(r.max_residual));
        out.push('\n');
    }
    out
}
