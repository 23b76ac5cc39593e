//! Adaptive Simpson quadrature.

use super::AnalyticError;

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, AnalyticError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(AnalyticError::QuadratureFailure { interval: (a, b) });
    }
    let l = recurse(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1)?;
    let r = recurse(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, AnalyticError> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}
