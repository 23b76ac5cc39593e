//! Frequency-domain diagnostics of the assembled generator.
//!
//! Resolvent norms along the imaginary axis are computed as reciprocal
//! smallest singular values of `i beta - A` in the energy metric (one banded
//! LU plus inverse iteration per point). Eigenvalue branches near the axis
//! come from shift-invert iteration with deflation. The resolvent-growth
//! probe forces the elastic string at the near-resonant frequency sequence
//! and records the energy-norm gain of the response.
//!
//! Scan points, shifts and probe frequencies are independent and evaluated
//! in parallel; iteration seeds derive from the frequency bits, so results
//! are identical to sequential execution.

use crate::analytic::{resonance_frequencies, AnalyticError, FrequencySequence};
use crate::disc::{assemble_generator, build_grids, BlockGenerator, Coupling, DiscError, SampleFns};
use crate::linalg::{
    fit_line, shift_invert_eigs, smallest_singular_value, BandedMatrix, LinalgError, LineFit,
    Metric,
};
use crate::model::{SystemKind, ValidatedParams};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::io::Write;

#[derive(Debug)]
pub enum SpectralError {
    /// The shifted operator is numerically singular: an eigenvalue sits on
    /// the imaginary axis within tolerance.
    NearSingularShift { beta: f64, sigma: f64 },
    NoConvergence(String),
    WindowTooSmall { have: usize, need: usize },
    /// The grid cannot resolve the largest probe frequency.
    UnderResolved { required: usize, got: usize },
    Disc(DiscError),
    Linalg(LinalgError),
    Analytic(AnalyticError),
    Io(std::io::Error),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::NearSingularShift { beta, sigma } => write!(
                f,
                "shift i*{beta} is numerically singular (sigma_min = {sigma:.3e})"
            ),
            SpectralError::NoConvergence(what) => write!(f, "no convergence: {what}"),
            SpectralError::WindowTooSmall { have, need } => {
                write!(f, "need {need} points, have {have}")
            }
            SpectralError::UnderResolved { required, got } => write!(
                f,
                "grid under-resolves the probe: need at least {required} cells per component, got {got}"
            ),
            SpectralError::Disc(e) => write!(f, "{e}"),
            SpectralError::Linalg(e) => write!(f, "{e}"),
            SpectralError::Analytic(e) => write!(f, "{e}"),
            SpectralError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SpectralError {}

impl From<DiscError> for SpectralError {
    fn from(e: DiscError) -> Self {
        SpectralError::Disc(e)
    }
}
impl From<LinalgError> for SpectralError {
    fn from(e: LinalgError) -> Self {
        SpectralError::Linalg(e)
    }
}
impl From<AnalyticError> for SpectralError {
    fn from(e: AnalyticError) -> Self {
        SpectralError::Analytic(e)
    }
}
impl From<std::io::Error> for SpectralError {
    fn from(e: std::io::Error) -> Self {
        SpectralError::Io(e)
    }
}

/// Resolvent norm `||(i beta - A)^{-1}||` of a matrix operator in the given
/// metric. `beta` is symmetrized to `|beta|`: the operator is real, so the
/// norm is even in `beta` and computing it this way keeps the symmetry
/// exact.
pub fn resolvent_norm_matrix(
    a: &BandedMatrix<f64>,
    metric: &Metric,
    beta: f64,
) -> Result<(f64, usize), SpectralError> {
    let beta = beta.abs();
    let b = a.complex_shifted(-1.0, Complex64::new(0.0, beta));
    let lu = b.lu().map_err(|_| SpectralError::NearSingularShift {
        beta,
        sigma: 0.0,
    })?;
    let apply = |x: &[Complex64]| b.matvec(x);
    let solve = |x: &[Complex64]| lu.solve(x).expect("dims fixed");
    let solve_h = |x: &[Complex64]| lu.solve_conj_transpose(x).expect("dims fixed");
    let seed = beta.to_bits() ^ 0x5eed;
    let (sigma, iters) =
        smallest_singular_value(&apply, &solve, &solve_h, metric, 1e-8, 500, seed)?;
    let scale = b.norm_inf();
    if sigma < 1e-13 * scale {
        return Err(SpectralError::NearSingularShift { beta, sigma });
    }
    Ok((1.0 / sigma, iters))
}

/// Resolvent norm of the generator in its energy metric.
pub fn resolvent_norm(g: &BlockGenerator, beta: f64) -> Result<f64, SpectralError> {
    let metric = g.metric();
    resolvent_norm_matrix(g.a_interleaved(), &metric, beta).map(|(r, _)| r)
}

/// Log-spaced resolvent-norm scan.
#[derive(Debug, Clone)]
pub struct ResolventScan {
    pub betas: Vec<f64>,
    pub norms: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl ResolventScan {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "beta,r")?;
        for (b, r) in self.betas.iter().zip(&self.norms) {
            writeln!(w, "{},{}", crate::fmt_sig17(*b), crate::fmt_sig17(*r))?;
        }
        Ok(())
    }
}

pub fn resolvent_scan(
    g: &BlockGenerator,
    beta_min: f64,
    beta_max: f64,
    count: usize,
) -> Result<ResolventScan, SpectralError> {
    if count == 0 || !(beta_min > 0.0) || (count > 1 && !(beta_max > beta_min)) {
        return Err(SpectralError::WindowTooSmall { have: 0, need: 1 });
    }
    let betas: Vec<f64> = if count == 1 {
        vec![beta_min]
    } else {
        let l0 = beta_min.ln();
        let l1 = beta_max.ln();
        (0..count)
            .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
            .collect()
    };
    let metric = g.metric();
    let results: Result<Vec<(f64, usize)>, SpectralError> = betas
        .par_iter()
        .map(|&b| resolvent_norm_matrix(g.a_interleaved(), &metric, b))
        .collect();
    let results = results?;
    Ok(ResolventScan {
        betas,
        norms: results.iter().map(|r| r.0).collect(),
        iterations: results.iter().map(|r| r.1).collect(),
    })
}

/// Upper envelope of a scan: local maxima (ties included, endpoints when
/// they dominate their neighbor). Falls back to the full scan when fewer
/// than two maxima exist, which covers monotone data.
pub fn upper_envelope(betas: &[f64], norms: &[f64]) -> Vec<(f64, f64)> {
    let n = norms.len();
    if n <= 2 {
        return betas.iter().copied().zip(norms.iter().copied()).collect();
    }
    let mut env = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || norms[i] >= norms[i - 1];
        let right_ok = i == n - 1 || norms[i] >= norms[i + 1];
        if left_ok && right_ok {
            env.push((betas[i], norms[i]));
        }
    }
    if env.len() < 2 {
        return betas.iter().copied().zip(norms.iter().copied()).collect();
    }
    env
}

/// Power-law fit of the scan's upper envelope.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub envelope: Vec<(f64, f64)>,
}

pub fn fit_resolvent_growth(scan: &ResolventScan) -> Result<GrowthFit, SpectralError> {
    if scan.betas.len() < 10 {
        return Err(SpectralError::WindowTooSmall {
            have: scan.betas.len(),
            need: 10,
        });
    }
    let envelope = upper_envelope(&scan.betas, &scan.norms);
    let xs: Vec<f64> = envelope.iter().map(|(b, _)| b.ln()).collect();
    let ys: Vec<f64> = envelope.iter().map(|(_, r)| r.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(GrowthFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        envelope,
    })
}

/// Eigenvalues found near the imaginary axis.
#[derive(Debug, Clone)]
pub struct EigenBranch {
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub shifts: Vec<f64>,
}

impl EigenBranch {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "re_lambda,im_lambda,residual")?;
        for (z, r) in self.eigenvalues.iter().zip(&self.residuals) {
            writeln!(
                w,
                "{},{},{}",
                crate::fmt_sig17(z.re),
                crate::fmt_sig17(z.im),
                crate::fmt_sig17(*r)
            )?;
        }
        Ok(())
    }

    pub fn spectral_abscissa(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .max_by(f64::total_cmp)
    }
}

/// Up to `k_per_shift` eigenvalues nearest each shift `i sigma`, deduplicated
/// across shifts at relative distance `1e-8`.
pub fn eigen_branch(
    g: &BlockGenerator,
    sigmas: &[f64],
    k_per_shift: usize,
) -> Result<EigenBranch, SpectralError> {
    let metric = g.metric();
    let a = g.a_interleaved();
    let per_shift: Result<Vec<Vec<(Complex64, f64)>>, SpectralError> = sigmas
        .par_iter()
        .map(|&sigma| {
            let shift = Complex64::new(0.0, sigma);
            let b = a.complex_shifted(1.0, -shift);
            let lu = b.lu().map_err(|_| SpectralError::NearSingularShift {
                beta: sigma,
                sigma: 0.0,
            })?;
            let apply = |x: &[Complex64]| a.matvec_complex(x);
            let solve = |x: &[Complex64]| lu.solve(x).expect("dims fixed");
            let solve_h = |x: &[Complex64]| lu.solve_conj_transpose(x).expect("dims fixed");
            let pairs = shift_invert_eigs(
                shift,
                k_per_shift,
                &apply,
                &solve,
                &solve_h,
                &metric,
                1e-8,
                500,
                sigma.to_bits(),
            )
            .map_err(|e| SpectralError::NoConvergence(format!("shift i*{sigma}: {e}")))?;
            Ok(pairs.into_iter().map(|p| (p.value, p.residual)).collect())
        })
        .collect();

    let mut eigenvalues: Vec<Complex64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for pairs in per_shift? {
        for (z, r) in pairs {
            match eigenvalues
                .iter()
                .position(|e| (e - z).norm() <= 1e-8 * z.norm().max(1e-300))
            {
                Some(i) => {
                    if r < residuals[i] {
                        eigenvalues[i] = z;
                        residuals[i] = r;
                    }
                }
                None => {
                    eigenvalues.push(z);
                    residuals.push(r);
                }
            }
        }
    }
    Ok(EigenBranch {
        eigenvalues,
        residuals,
        shifts: sigmas.to_vec(),
    })
}

/// One row of the abscissa-vs-resolution table.
#[derive(Debug, Clone, Copy)]
pub struct AbscissaRow {
    pub n: usize,
    pub abscissa: f64,
    pub eigen_count: usize,
}

/// Largest real part found near the axis, per grid resolution.
pub fn spectral_abscissa_study(
    p: &ValidatedParams,
    kind: SystemKind,
    coupling: Coupling,
    n_list: &[usize],
    sigma_max: f64,
    k_per_shift: usize,
) -> Result<Vec<AbscissaRow>, SpectralError> {
    if !n_list.windows(2).all(|w| w[1] > w[0]) {
        return Err(SpectralError::WindowTooSmall {
            have: n_list.len(),
            need: 2,
        });
    }
    let sigma_lo = (sigma_max / 50.0).max(0.5);
    let shifts: Vec<f64> = (0..12)
        .map(|i| sigma_lo * (sigma_max / sigma_lo).powf(i as f64 / 11.0))
        .collect();
    let mut rows = Vec::new();
    for &n in n_list {
        let g = assemble_generator(p, kind, build_grids(p, n, n)?, coupling)?;
        let branch = eigen_branch(&g, &shifts, k_per_shift)?;
        rows.push(AbscissaRow {
            n,
            abscissa: branch.spectral_abscissa().unwrap_or(f64::NAN),
            eigen_count: branch.eigenvalues.len(),
        });
    }
    Ok(rows)
}

/// Result of the resolvent-growth probe.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub ws: Vec<f64>,
    pub gains: Vec<f64>,
    pub fit: LineFit,
    pub sequence: FrequencySequence,
}

impl ProbeResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "w,gain")?;
        for (x, g) in self.ws.iter().zip(&self.gains) {
            writeln!(w, "{},{}", crate::fmt_sig17(*x), crate::fmt_sig17(*g))?;
        }
        Ok(())
    }
}

/// Energy-norm gains `||y||_M / ||f||_M` of the shifted solves
/// `w^a (i w - A) y = f` with the unit-normalized string forcing
/// `f = -alpha1 sin(w x / sqrt(alpha1))` in the string-velocity block.
pub fn gain_at_frequencies(
    g: &BlockGenerator,
    ws: &[f64],
    alpha_exponent: f64,
) -> Result<Vec<f64>, SpectralError> {
    let metric = g.metric();
    let a = g.a_interleaved();
    let alpha1 = g.params.alpha1;
    ws.par_iter()
        .map(|&w| {
            let forcing = move |x: f64| -alpha1 * (w * x / alpha1.sqrt()).sin();
            let f_state = g.sample_state(&SampleFns {
                v1: Some(&forcing),
                ..Default::default()
            });
            let f_c: Vec<Complex64> = g
                .to_interleaved(&f_state.data)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            let b = a.complex_shifted(-1.0, Complex64::new(0.0, w));
            let lu = b.lu().map_err(|_| SpectralError::NearSingularShift {
                beta: w,
                sigma: 0.0,
            })?;
            let y = lu.solve(&f_c).expect("dims fixed");
            let fnorm = metric.norm(&f_c);
            let ynorm = metric.norm(&y);
            Ok(ynorm / fnorm / w.powf(alpha_exponent))
        })
        .collect()
}

/// Required cells per component to resolve frequency `w_max`.
pub fn probe_resolution_requirement(p: &ValidatedParams, w_max: f64) -> usize {
    (20.0 * w_max * p.ell1.max(p.ell2) / std::f64::consts::PI).ceil() as usize
}

/// Drives the near-resonant frequency sequence through the discrete
/// resolvent and fits the gain growth. The generator is the thermoelastic
/// beam system on an `n1 x n2` grid, which must satisfy the resolution rule
/// `n >= 20 w_max max(ell)/pi`.
pub fn lack_exp_probe(
    p: &ValidatedParams,
    n1: usize,
    n2: usize,
    count: usize,
    alpha_exponent: f64,
) -> Result<ProbeResult, SpectralError> {
    let sequence = resonance_frequencies(p, count)?;
    if sequence.ws.is_empty() {
        return Err(SpectralError::Analytic(AnalyticError::InvalidInput(
            "frequency sequence is empty".into(),
        )));
    }
    let w_max = *sequence.ws.last().unwrap();
    let required = probe_resolution_requirement(p, w_max);
    let got = n1.min(n2);
    if got < required {
        return Err(SpectralError::UnderResolved { required, got });
    }
    let g = assemble_generator(
        p,
        SystemKind::S2ElasticStringThermoBeam,
        build_grids(p, n1, n2)?,
        Coupling::Full,
    )?;
    let gains = gain_at_frequencies(&g, &sequence.ws, alpha_exponent)?;
    let xs: Vec<f64> = sequence.ws.iter().map(|w| w.ln()).collect();
    let ys: Vec<f64> = gains.iter().map(|g| g.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(ProbeResult {
        ws: sequence.ws.clone(),
        gains,
        fit,
        sequence,
    })
}
