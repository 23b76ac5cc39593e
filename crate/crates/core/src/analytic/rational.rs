//! Continued-fraction rational approximation and the near-resonant
//! frequency sequence built from it.

use super::AnalyticError;
use crate::model::ValidatedParams;

/// Continued-fraction convergents `p/q` of a positive real, each satisfying
/// the Dirichlet inequality `|x - p/q| < 1/q^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletApprox {
    pub pairs: Vec<(u64, u64)>,
    /// True if the expansion stopped before `count` convergents: the target
    /// is rational to floating precision, or the approximants outgrew u64.
    pub terminated: bool,
}

/// First `count` continued-fraction convergents of `x > 0` with positive
/// numerators, denominators strictly increasing.
pub fn dirichlet_sequence(x: f64, count: usize) -> Result<DirichletApprox, AnalyticError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(AnalyticError::InvalidInput(format!(
            "approximation target must be positive and finite, got {x}"
        )));
    }
    if count == 0 {
        return Err(AnalyticError::InvalidInput("count must be >= 1".into()));
    }
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(count);
    // h/k recurrences with the usual seeds.
    let (mut h_prev, mut h) = (1u64, 0u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut xi = x;
    let mut terminated = false;
    while pairs.len() < count {
        let a = xi.floor();
        if a < 0.0 || a > 1e15 {
            terminated = true;
            break;
        }
        let ai = a as u64;
        let (Some(h_new), Some(k_new)) = (
            ai.checked_mul(h).and_then(|v| v.checked_add(h_prev)),
            ai.checked_mul(k).and_then(|v| v.checked_add(k_prev)),
        ) else {
            terminated = true;
            break;
        };
        // Denominators beyond ~1e15 cannot be certified against 1/q^2 in
        // double precision.
        if k_new as f64 > 1e15 {
            terminated = true;
            break;
        }
        h_prev = h;
        h = h_new;
        k_prev = k;
        k = k_new;
        if h >= 1 {
            // Strictly increasing denominators: replace an equal-q
            // predecessor by the better approximant.
            if pairs.last().map(|&(_, q)| q) == Some(k) {
                pairs.pop();
            }
            pairs.push((h, k));
        }
        let frac = xi - a;
        if frac.abs() < 1e-12 {
            terminated = true;
            break;
        }
        xi = 1.0 / frac;
    }
    Ok(DirichletApprox { pairs, terminated })
}

/// The frequency sequence driving the resolvent-growth probe.
///
/// With `b = alpha2 + delta2 beta2`, the convergent denominators `q_n` of
/// `(alpha1/b)^{1/4}` define `gamma_n = (q_n + alpha/q_n^2)^2` with
/// `alpha = alpha1^{1/4} / (4 b^{1/4})`, and `w_n = sqrt(alpha1) gamma_n`.
/// Along these frequencies the string is near-resonant with the beam's
/// slow branch and the resolvent gain grows.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySequence {
    pub ws: Vec<f64>,
    pub gammas: Vec<f64>,
    pub qs: Vec<u64>,
    pub alpha: f64,
    /// The approximation target `(alpha1/b)^{1/4}`.
    pub target: f64,
    /// True if the target is rational to floating precision and the
    /// sequence is shorter than requested.
    pub truncated: bool,
}

pub fn resonance_frequencies(
    p: &ValidatedParams,
    count: usize,
) -> Result<FrequencySequence, AnalyticError> {
    let b = p.alpha2 + p.delta2 * p.beta2;
    let target = (p.alpha1 / b).powf(0.25);
    let alpha = p.alpha1.powf(0.25) / (4.0 * b.powf(0.25));
    let approx = dirichlet_sequence(target, count)?;
    let mut ws = Vec::with_capacity(approx.pairs.len());
    let mut gammas = Vec::new();
    let mut qs = Vec::new();
    for &(_, q) in &approx.pairs {
        let qf = q as f64;
        let root = qf + alpha / (qf * qf);
        let gamma = root * root;
        gammas.push(gamma);
        ws.push(p.alpha1.sqrt() * gamma);
        qs.push(q);
    }
    Ok(FrequencySequence {
        ws,
        gammas,
        qs,
        alpha,
        target,
        truncated: approx.terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, MaterialParams};

    fn check_dirichlet(x: f64, pairs: &[(u64, u64)]) {
        for &(p, q) in pairs {
            let err = (x - p as f64 / q as f64).abs();
            assert!(
                err < 1.0 / (q as f64 * q as f64),
                "|{x} - {p}/{q}| = {err} fails the 1/q^2 bound"
            );
        }
    }

    #[test]
    fn sqrt2_convergents() {
        let d = dirichlet_sequence(2f64.sqrt(), 5).unwrap();
        assert_eq!(d.pairs, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
        assert!(!d.terminated);
        check_dirichlet(2f64.sqrt(), &d.pairs);
        // Spot-check the third convergent.
        let err = (2f64.sqrt() - 7.0 / 5.0).abs();
        assert!((err - 0.01421).abs() < 1e-4 && err < 1.0 / 25.0);
    }

    #[test]
    fn rational_input_flagged() {
        let d = dirichlet_sequence(0.5, 6).unwrap();
        assert_eq!(d.pairs, vec![(1, 2)]);
        assert!(d.terminated);
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let d = dirichlet_sequence(phi, 8).unwrap();
        check_dirichlet(phi, &d.pairs);
        // Numerators and denominators obey the Fibonacci recurrence.
        for k in 2..d.pairs.len() {
            assert_eq!(d.pairs[k].0, d.pairs[k - 1].0 + d.pairs[k - 2].0);
            assert_eq!(d.pairs[k].1, d.pairs[k - 1].1 + d.pairs[k - 2].1);
        }
        // Denominators strictly increase even though the expansion has
        // leading partial quotients equal to 1.
        assert!(d.pairs.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn frequency_sequence_formula() {
        // alpha1 = 2, b = 1: alpha = 2^{1/4}/4, gamma = (q + alpha/q^2)^2,
        // w = sqrt(2) gamma. Cross-checked by direct evaluation.
        let mut raw = MaterialParams::ones_pi();
        raw.alpha1 = 2.0;
        raw.alpha2 = 0.5;
        raw.beta2 = 1.0;
        raw.delta2 = 0.5;
        let p = validate_params(raw).unwrap();
        let seq = resonance_frequencies(&p, 8).unwrap();
        assert!((seq.target - 2f64.powf(0.25)).abs() < 1e-15);
        assert!((seq.alpha - 2f64.powf(0.25) / 4.0).abs() < 1e-15);
        for (i, &q) in seq.qs.iter().enumerate() {
            let alpha = 2f64.powf(0.25) / 4.0;
            let gamma = (q as f64 + alpha / (q as f64).powi(2)).powi(2);
            assert!((seq.gammas[i] - gamma).abs() < 1e-12 * gamma);
            assert!((seq.ws[i] - 2f64.sqrt() * gamma).abs() < 1e-12 * seq.ws[i]);
        }
        if seq.qs.contains(&5) {
            let i = seq.qs.iter().position(|&q| q == 5).unwrap();
            let alpha = 2f64.powf(0.25) / 4.0;
            let gamma = (5.0 + alpha / 25.0).powi(2);
            assert!((seq.gammas[i] - gamma).abs() < 1e-12 * gamma);
        }
        // Strictly increasing.
        assert!(seq.ws.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rational_target_flagged() {
        // alpha1 = b = 1 makes the target exactly 1.
        let p = validate_params(MaterialParams::ones_pi()).unwrap();
        let mut raw = *p.raw();
        raw.alpha2 = 0.5;
        raw.beta2 = 1.0;
        raw.delta2 = 0.5;
        let p = validate_params(raw).unwrap();
        let seq = resonance_frequencies(&p, 6).unwrap();
        assert!(seq.truncated);
        assert_eq!(seq.qs, vec![1]);
    }

    #[test]
    fn random_targets_satisfy_dirichlet() {
        let mut seed = 99u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let x = 0.3 + 2.4 * next();
            let d = dirichlet_sequence(x, 8).unwrap();
            check_dirichlet(x, &d.pairs);
        }
    }
}
