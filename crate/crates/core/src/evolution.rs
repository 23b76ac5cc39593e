//! Time integration with exact discrete energy balance.
//!
//! The stepper is the implicit midpoint rule (the Cayley transform of the
//! generator), the unique standard one-step scheme for which the quadratic
//! energy satisfies, per step and up to round-off,
//!
//! `E(y+) - E(y) = -dt * dissipation((y + y+)/2)`.
//!
//! For any `dt > 0` the step is a contraction in the energy norm, and on the
//! conservative core it is an isometry.

use crate::disc::{BlockGenerator, Coupling, DiscError, SampleFns, StateVector};
use crate::linalg::{fit_line, LuFactors};
use crate::model::SystemKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::io::Write;

#[derive(Debug)]
pub enum EvolutionError {
    /// The shifted solve failed. Cannot occur for a dissipative generator
    /// and positive dt; treated as an internal error.
    SingularStep,
    BadRecipe(String),
    WindowTooSmall { have: usize, need: usize },
    EnergyUnderflow { t: f64 },
    Disc(DiscError),
    Io(std::io::Error),
}

impl fmt::Display for EvolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionError::SingularStep => write!(f, "implicit midpoint solve was singular"),
            EvolutionError::BadRecipe(msg) => write!(f, "bad initial data recipe: {msg}"),
            EvolutionError::WindowTooSmall { have, need } => {
                write!(f, "fit window has {have} usable samples, need {need}")
            }
            EvolutionError::EnergyUnderflow { t } => {
                write!(f, "energy underflow inside fit window at t = {t}")
            }
            EvolutionError::Disc(e) => write!(f, "{e}"),
            EvolutionError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EvolutionError {}

impl From<DiscError> for EvolutionError {
    fn from(e: DiscError) -> Self {
        EvolutionError::Disc(e)
    }
}

impl From<std::io::Error> for EvolutionError {
    fn from(e: std::io::Error) -> Self {
        EvolutionError::Io(e)
    }
}

/// Reusable implicit-midpoint stepper; factors `I - dt/2 A` once.
pub struct ImplicitMidpoint<'g> {
    g: &'g BlockGenerator,
    dt: f64,
    factors: LuFactors<f64>,
}

impl<'g> ImplicitMidpoint<'g> {
    pub fn new(g: &'g BlockGenerator, dt: f64) -> Result<Self, EvolutionError> {
        assert!(dt != 0.0, "dt must be nonzero");
        let factors = g
            .factor_shifted_identity(dt / 2.0)
            .map_err(|_| EvolutionError::SingularStep)?;
        Ok(ImplicitMidpoint { g, dt, factors })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step on an interleaved vector.
    pub fn step_interleaved(&self, y: &mut Vec<f64>) {
        let ay = self.g.a_interleaved().matvec(y);
        for (yi, ai) in y.iter_mut().zip(&ay) {
            *yi += 0.5 * self.dt * ai;
        }
        self.factors.solve_in_place(y);
    }

    pub fn step(&self, y: &StateVector) -> Result<StateVector, EvolutionError> {
        let mut inter = self.g.to_interleaved(&y.data);
        self.step_interleaved(&mut inter);
        let mut out = self.g.zero_state();
        out.data = self.g.from_interleaved(&inter);
        Ok(out)
    }
}

/// One implicit-midpoint step `y+ = (I - dt/2 A)^{-1} (I + dt/2 A) y`.
pub fn step_implicit_midpoint(
    g: &BlockGenerator,
    y: &StateVector,
    dt: f64,
) -> Result<StateVector, EvolutionError> {
    ImplicitMidpoint::new(g, dt)?.step(y)
}

/// Sampled time series of energy and dissipation.
#[derive(Debug, Clone)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub dissipations: Vec<f64>,
    pub kind: SystemKind,
    pub dt: f64,
    /// `dt * sum of dissipation(midpoint)` over all steps; telescopes the
    /// energy balance across the whole run.
    pub midpoint_dissipation_integral: f64,
}

impl EnergyTrace {
    /// Writes `t,E,D` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,E,D")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{}",
                crate::fmt_sig17(self.times[i]),
                crate::fmt_sig17(self.energies[i]),
                crate::fmt_sig17(self.dissipations[i])
            )?;
        }
        Ok(())
    }
}

/// Integrates from `y0` to `t_end`, sampling every `stride` steps (the
/// initial and final states are always sampled).
pub fn simulate(
    g: &BlockGenerator,
    y0: &StateVector,
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<EnergyTrace, EvolutionError> {
    assert!(dt > 0.0 && t_end > 0.0, "dt and t_end must be positive");
    let stride = stride.max(1);
    let stepper = ImplicitMidpoint::new(g, dt)?;
    let n_steps = (t_end / dt).ceil() as usize;

    let mut inter = g.to_interleaved(&y0.data);
    let mut times = Vec::with_capacity(n_steps / stride + 2);
    let mut energies = Vec::new();
    let mut dissipations = Vec::new();

    let sample = |v: &Vec<f64>, t: f64, times: &mut Vec<f64>, es: &mut Vec<f64>, ds: &mut Vec<f64>, g: &BlockGenerator| {
        let block = g.from_interleaved(v);
        es.push(0.5 * g.energy_inner(&block, &block));
        ds.push(g.dissipation_of(&block));
        times.push(t);
    };

    sample(&inter, 0.0, &mut times, &mut energies, &mut dissipations, g);
    let mut diss_integral = 0.0;
    for k in 0..n_steps {
        let prev = inter.clone();
        stepper.step_interleaved(&mut inter);
        // Midpoint dissipation, evaluated in the interleaved frame.
        let mid: Vec<f64> = prev
            .iter()
            .zip(&inter)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mid_block = g.from_interleaved(&mid);
        diss_integral += dt * g.dissipation_of(&mid_block);
        let t = (k + 1) as f64 * dt;
        if (k + 1) % stride == 0 || k + 1 == n_steps {
            sample(&inter, t, &mut times, &mut energies, &mut dissipations, g);
        }
    }

    Ok(EnergyTrace {
        times,
        energies,
        dissipations,
        kind: g.kind,
        dt,
        midpoint_dissipation_integral: diss_integral,
    })
}

/// Decay-law model selected by [`fit_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    Exponential,
    Polynomial,
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayModel::Exponential => write!(f, "exponential"),
            DecayModel::Polynomial => write!(f, "polynomial"),
        }
    }
}

/// Result of fitting `E(t) ~ C exp(-lambda t)` against `E(t) ~ C (1+t)^-p`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub model: DecayModel,
    /// Decay rate `lambda` (exponential) or exponent `p` (polynomial) of the
    /// selected model.
    pub value: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub exponential: (f64, f64),
    pub polynomial: (f64, f64),
}

/// Least-squares decay fit on a window (defaults to `[t_end/10, t_end]`).
///
/// Exponential: `log E` against `t`. Polynomial: `log E` against `log(1+t)`,
/// the shifted axis that makes `E = (1+t)^-p` exactly affine. The model with
/// the larger coefficient of determination wins; both candidates are
/// reported.
pub fn fit_decay(
    trace: &EnergyTrace,
    window: Option<(f64, f64)>,
) -> Result<DecayFit, EvolutionError> {
    let t_end = *trace.times.last().unwrap_or(&0.0);
    let (w0, w1) = window.unwrap_or((t_end / 10.0, t_end));
    let mut ts = Vec::new();
    let mut es = Vec::new();
    for (&t, &e) in trace.times.iter().zip(&trace.energies) {
        if t >= w0 && t <= w1 {
            if e > 0.0 && e < 1e-300 {
                return Err(EvolutionError::EnergyUnderflow { t });
            }
            if e > 0.0 {
                ts.push(t);
                es.push(e);
            }
        }
    }
    if ts.len() < 10 {
        return Err(EvolutionError::WindowTooSmall {
            have: ts.len(),
            need: 10,
        });
    }
    let log_e: Vec<f64> = es.iter().map(|e| e.ln()).collect();
    let log_t: Vec<f64> = ts.iter().map(|t| (1.0 + t).ln()).collect();
    let exp_fit = fit_line(&ts, &log_e).map_err(|_| EvolutionError::WindowTooSmall {
        have: ts.len(),
        need: 10,
    })?;
    let poly_fit = fit_line(&log_t, &log_e).map_err(|_| EvolutionError::WindowTooSmall {
        have: ts.len(),
        need: 10,
    })?;
    let exponential = (-exp_fit.slope, exp_fit.r_squared);
    let polynomial = (-poly_fit.slope, poly_fit.r_squared);
    let (model, value, r2) = if exp_fit.r_squared >= poly_fit.r_squared {
        (DecayModel::Exponential, exponential.0, exponential.1)
    } else {
        (DecayModel::Polynomial, polynomial.0, polynomial.1)
    };
    Ok(DecayFit {
        model,
        value,
        r_squared: r2,
        window: (w0, w1),
        exponential,
        polynomial,
    })
}

/// Initial-data recipes. Every recipe produces a state that satisfies the
/// essential constraints by construction and is normalized to unit energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// String displacement `sin(k pi x / ell1)`, everything else zero.
    Modal { k: usize },
    /// All blocks filled from a seeded ChaCha stream.
    RandomSeeded { seed: u64 },
    /// A C^2 bump supported near the interface on both components,
    /// continuous across it.
    InterfaceBump,
}

pub fn make_initial_data(
    g: &BlockGenerator,
    recipe: InitialData,
) -> Result<StateVector, EvolutionError> {
    let mut y = match recipe {
        InitialData::Modal { k } => {
            if k == 0 || 2 * k >= g.grid1.n {
                return Err(EvolutionError::BadRecipe(format!(
                    "mode {k} is not resolvable on {} string cells",
                    g.grid1.n
                )));
            }
            let ell1 = g.grid1.ell;
            let f = move |x: f64| (k as f64 * std::f64::consts::PI * x / ell1).sin();
            g.sample_state(&SampleFns {
                u1: Some(&f),
                ..Default::default()
            })
        }
        InitialData::RandomSeeded { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut y = g.zero_state();
            for v in &mut y.data {
                *v = rng.gen_range(-1.0..1.0);
            }
            y
        }
        InitialData::InterfaceBump => {
            // Quintic smoothstep from 1 at the interface down to 0 at a
            // third of each component length; C^2, slope zero at both ends.
            let bump = |s: f64| {
                let t = (3.0 * s).clamp(0.0, 1.0);
                1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
            };
            let ell1 = g.grid1.ell;
            let ell2 = g.grid2.ell;
            let f1 = move |x: f64| bump(x / ell1);
            let f2 = move |x: f64| bump(x / ell2);
            g.sample_state(&SampleFns {
                u1: Some(&f1),
                u2: Some(&f2),
                ..Default::default()
            })
        }
    };
    let e = g.energy(&y)?;
    if !(e > 0.0) {
        return Err(EvolutionError::BadRecipe(
            "recipe produced a zero-energy state".into(),
        ));
    }
    y.scale(1.0 / e.sqrt());
    Ok(y)
}

/// True if the trace is non-increasing up to `slack * E(0)`.
pub fn trace_is_monotone(trace: &EnergyTrace, slack: f64) -> bool {
    let e0 = trace.energies.first().copied().unwrap_or(0.0);
    trace
        .energies
        .windows(2)
        .all(|w| w[1] <= w[0] + slack * e0)
}

/// Convenience used by tests and the CLI: conservative-core variant check.
pub fn is_conservative(g: &BlockGenerator) -> bool {
    g.coupling == Coupling::ConservativeCore
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::{assemble_full, assemble_generator, build_grids};
    use crate::model::{validate_params, MaterialParams};

    fn gen(kind: SystemKind, n: usize) -> BlockGenerator {
        let p = validate_params(MaterialParams::ones_pi()).unwrap();
        assemble_full(&p, kind, n, n).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = gen(SystemKind::S1ThermoStringElasticBeam, 8);
        let y = g.zero_state();
        let y1 = step_implicit_midpoint(&g, &y, 0.01).unwrap();
        assert!(y1.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn per_step_energy_balance() {
        let g = gen(SystemKind::S1ThermoStringElasticBeam, 16);
        let y = make_initial_data(&g, InitialData::RandomSeeded { seed: 7 }).unwrap();
        let e0 = g.energy(&y).unwrap();
        let y1 = step_implicit_midpoint(&g, &y, 1e-2).unwrap();
        let e1 = g.energy(&y1).unwrap();
        let mid: Vec<f64> = y
            .data
            .iter()
            .zip(&y1.data)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let d = g.dissipation_of(&mid);
        assert!(
            (e1 - e0 + 1e-2 * d).abs() < 1e-10 * e0,
            "balance residual {}",
            e1 - e0 + 1e-2 * d
        );
    }

    #[test]
    fn conservative_core_cayley_is_isometry() {
        let p = validate_params(MaterialParams::ones_pi()).unwrap();
        let g = assemble_generator(
            &p,
            SystemKind::S2ElasticStringThermoBeam,
            build_grids(&p, 12, 12).unwrap(),
            crate::disc::Coupling::ConservativeCore,
        )
        .unwrap();
        let y = make_initial_data(&g, InitialData::RandomSeeded { seed: 3 }).unwrap();
        let mut cur = y.clone();
        let stepper = ImplicitMidpoint::new(&g, 0.05).unwrap();
        for _ in 0..50 {
            cur = stepper.step(&cur).unwrap();
        }
        let e = g.energy(&cur).unwrap();
        assert!((e - 1.0).abs() < 1e-10, "energy drifted to {e}");
    }

    #[test]
    fn reversibility_of_conservative_core() {
        let p = validate_params(MaterialParams::ones_pi()).unwrap();
        let g = assemble_generator(
            &p,
            SystemKind::S1ThermoStringElasticBeam,
            build_grids(&p, 10, 10).unwrap(),
            crate::disc::Coupling::ConservativeCore,
        )
        .unwrap();
        let y = make_initial_data(&g, InitialData::InterfaceBump).unwrap();
        let fwd = step_implicit_midpoint(&g, &y, 0.02).unwrap();
        let back = step_implicit_midpoint(&g, &fwd, -0.02).unwrap();
        let err: f64 = back
            .data
            .iter()
            .zip(&y.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-8, "reversibility error {err}");
    }

    #[test]
    fn unconditional_stability_large_dt() {
        let g = gen(SystemKind::S2ElasticStringThermoBeam, 16);
        let y = make_initial_data(&g, InitialData::RandomSeeded { seed: 11 }).unwrap();
        for dt in [1e-3, 0.1, 10.0, 1e3] {
            let y1 = step_implicit_midpoint(&g, &y, dt).unwrap();
            let e1 = g.energy(&y1).unwrap();
            assert!(e1 <= 1.0 + 1e-10, "dt {dt} grew energy to {e1}");
        }
    }

    #[test]
    fn simulate_zero_initial_data() {
        let g = gen(SystemKind::S1ThermoStringElasticBeam, 8);
        let y = g.zero_state();
        let tr = simulate(&g, &y, 0.1, 1.0, 2).unwrap();
        assert!(tr.energies.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn simulate_monotone_and_telescoping() {
        let g = gen(SystemKind::S1ThermoStringElasticBeam, 16);
        let y = make_initial_data(&g, InitialData::Modal { k: 1 }).unwrap();
        let tr = simulate(&g, &y, 5e-3, 2.0, 10).unwrap();
        assert!(trace_is_monotone(&tr, 1e-10));
        let e0 = tr.energies.first().unwrap();
        let en = tr.energies.last().unwrap();
        let res = (e0 - en - tr.midpoint_dissipation_integral).abs();
        assert!(res < 1e-10 * e0, "telescoping residual {res}");
    }

    #[test]
    fn fit_recovers_exponential() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.5).collect();
        let energies: Vec<f64> = times.iter().map(|t| 5.0 * (-0.3 * t).exp()).collect();
        let tr = EnergyTrace {
            dissipations: vec![0.0; times.len()],
            times,
            energies,
            kind: SystemKind::S1ThermoStringElasticBeam,
            dt: 0.5,
            midpoint_dissipation_integral: 0.0,
        };
        let fit = fit_decay(&tr, None).unwrap();
        assert_eq!(fit.model, DecayModel::Exponential);
        assert!((fit.value - 0.3).abs() < 1e-6);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn fit_recovers_polynomial() {
        let times: Vec<f64> = (0..1000).map(|i| i as f64 * 0.1).collect();
        let energies: Vec<f64> = times.iter().map(|t| 1.0 / (1.0 + t)).collect();
        let tr = EnergyTrace {
            dissipations: vec![0.0; times.len()],
            times,
            energies,
            kind: SystemKind::S2ElasticStringThermoBeam,
            dt: 0.1,
            midpoint_dissipation_integral: 0.0,
        };
        let fit = fit_decay(&tr, Some((10.0, 100.0))).unwrap();
        assert_eq!(fit.model, DecayModel::Polynomial);
        assert!((fit.value - 1.0).abs() < 0.02, "p = {}", fit.value);
    }

    #[test]
    fn fit_round_trip_within_tolerance() {
        // Data generated from each model is recovered to 1e-6.
        let times: Vec<f64> = (0..500).map(|i| 1.0 + i as f64 * 0.2).collect();
        let en_poly: Vec<f64> = times.iter().map(|t| 3.0 * (1.0 + t).powf(-1.7)).collect();
        let tr = EnergyTrace {
            dissipations: vec![0.0; times.len()],
            times: times.clone(),
            energies: en_poly,
            kind: SystemKind::S2ElasticStringThermoBeam,
            dt: 0.2,
            midpoint_dissipation_integral: 0.0,
        };
        let fit = fit_decay(&tr, None).unwrap();
        assert_eq!(fit.model, DecayModel::Polynomial);
        assert!((fit.value - 1.7).abs() < 1e-6);
    }

    #[test]
    fn window_too_small_and_underflow() {
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let mut energies: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let tr = EnergyTrace {
            dissipations: vec![0.0; 20],
            times: times.clone(),
            energies: energies.clone(),
            kind: SystemKind::S1ThermoStringElasticBeam,
            dt: 1.0,
            midpoint_dissipation_integral: 0.0,
        };
        assert!(matches!(
            fit_decay(&tr, Some((15.0, 19.0))),
            Err(EvolutionError::WindowTooSmall { .. })
        ));
        energies[10] = 1e-310;
        let tr2 = EnergyTrace {
            dissipations: vec![0.0; 20],
            times,
            energies,
            kind: SystemKind::S1ThermoStringElasticBeam,
            dt: 1.0,
            midpoint_dissipation_integral: 0.0,
        };
        assert!(matches!(
            fit_decay(&tr2, Some((0.0, 19.0))),
            Err(EvolutionError::EnergyUnderflow { .. })
        ));
    }

    #[test]
    fn initial_data_recipes() {
        let g = gen(SystemKind::S1ThermoStringElasticBeam, 32);
        // Modal: unit energy, proportional to the sine interpolant.
        let y = make_initial_data(&g, InitialData::Modal { k: 1 }).unwrap();
        assert!((g.energy(&y).unwrap() - 1.0).abs() < 1e-12);
        let u = y.u1();
        let x1 = g.grid1.primal(1);
        let ratio = u[1] / (std::f64::consts::PI * x1 / g.grid1.ell).sin();
        for i in 1..u.len() {
            let xi = g.grid1.primal(i);
            let s = (std::f64::consts::PI * xi / g.grid1.ell).sin();
            assert!((u[i] - ratio * s).abs() < 1e-12 * ratio.abs());
        }
        // Random: deterministic.
        let a = make_initial_data(&g, InitialData::RandomSeeded { seed: 42 }).unwrap();
        let b = make_initial_data(&g, InitialData::RandomSeeded { seed: 42 }).unwrap();
        assert_eq!(a.data, b.data);
        // Bump: continuous at the interface (single shared DOF), supported
        // near x = 0 on both components.
        let y = make_initial_data(&g, InitialData::InterfaceBump).unwrap();
        assert!(y.interface_displacement() > 0.0);
        let u2 = y.u2();
        let far = &u2[u2.len() / 2..];
        assert!(far.iter().all(|&v| v == 0.0));
        // Unresolvable mode is rejected.
        assert!(matches!(
            make_initial_data(&g, InitialData::Modal { k: 16 }),
            Err(EvolutionError::BadRecipe(_))
        ));
    }

    #[test]
    fn csv_shape() {
        let tr = EnergyTrace {
            times: vec![0.0, 1.0],
            energies: vec![1.0, 0.5],
            dissipations: vec![0.25, 0.125],
            kind: SystemKind::S1ThermoStringElasticBeam,
            dt: 1.0,
            midpoint_dissipation_integral: 0.5,
        };
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "t,E,D");
        assert!(lines.next().unwrap().starts_with("0.0000000000000000e0,"));
    }
}
