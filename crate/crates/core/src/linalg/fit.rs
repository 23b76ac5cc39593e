//! Ordinary least-squares line fit.

use super::LinalgError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(xs, ys)`. Exact on affine data; `r_squared`
/// is the coefficient of determination on the given axes (1.0 for constant
/// data fitted exactly by a horizontal line).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit, LinalgError> {
    if xs.len() != ys.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(LinalgError::DegenerateData);
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(LinalgError::DegenerateData);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SeedStream;

    #[test]
    fn exact_on_affine_data() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.25 - 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [5.0, 5.0, 5.0];
        let f = fit_line(&xs, &ys).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn degenerate_abscissae_rejected() {
        assert!(matches!(
            fit_line(&[1.0, 1.0], &[0.0, 2.0]),
            Err(LinalgError::DegenerateData)
        ));
        assert!(matches!(
            fit_line(&[1.0], &[0.0]),
            Err(LinalgError::DegenerateData)
        ));
    }

    #[test]
    fn noisy_line_slope_within_three_standard_errors() {
        let mut s = SeedStream::new(123);
        let n = 1000;
        let true_slope = -0.7;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / 100.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| true_slope * x + 0.3 + 0.05 * s.next_f64())
            .collect();
        let f = fit_line(&xs, &ys).unwrap();
        // Noise is uniform(-0.05, 0.05): sd ~ 0.0289; slope standard error
        // sd / (sqrt(n) * sd_x) with sd_x ~ 2.89.
        let se = 0.0289 / ((n as f64).sqrt() * 2.89);
        assert!((f.slope - true_slope).abs() < 3.0 * se, "slope {}", f.slope);
    }
}
