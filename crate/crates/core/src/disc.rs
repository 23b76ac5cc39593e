//! Mimetic semi-discretization of the two transmission systems.
//!
//! Layout: displacements, velocities and temperatures live on primal nodes
//! `x_i = i h`, heat fluxes on staggered dual nodes `x_{i+1/2}`. The gradient
//! primal->dual and its exact negative adjoint dual->primal make the
//! temperature/flux cross terms cancel identically, so the semi-discrete
//! energy balance
//!
//! `Re <A_h y, y>_M = -(gamma/kappa) ||q||^2_M`
//!
//! holds to machine precision for every state, not merely up to O(h^2).
//! Elastic and thermo-elastic couplings are assembled from one weak form
//! (stiffness `S = D^T W D` plus a coupling block and its exact transpose),
//! which also produces the natural boundary conditions and the interface
//! force balance on the shared degree of freedom.
//!
//! Essential constraints are eliminated, never stored: Dirichlet ends for
//! the displacements and the temperature, the clamped slope of the beam at
//! the interface (ghost-node reflection inside the bending operator), and
//! the continuity `u1(0) = u2(0)` realized by one shared displacement DOF
//! (and one shared velocity DOF).

use crate::linalg::{BandedMatrix, LuFactors, Metric, Scalar};
use crate::model::{
    dissipation_coefficient, energy_weights, SystemKind, ValidatedParams, WeightSet,
};
use num_complex::Complex64;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

/// Errors from grid construction, assembly and application.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscError {
    /// Fewer than 4 cells cannot carry the interface and boundary closures.
    GridTooCoarse { n: usize },
    AssemblyError(String),
    DimensionMismatch { expected: usize, got: usize },
    /// The stationary solve failed; the generator should always be
    /// invertible, so this indicates an internal inconsistency.
    SingularGenerator,
}

impl fmt::Display for DiscError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscError::GridTooCoarse { n } => {
                write!(f, "grid too coarse: n = {n}, need at least 4 cells")
            }
            DiscError::AssemblyError(msg) => write!(f, "assembly error: {msg}"),
            DiscError::DimensionMismatch { expected, got } => {
                write!(f, "state has {got} entries, generator expects {expected}")
            }
            DiscError::SingularGenerator => write!(f, "stationary solve hit a singular operator"),
        }
    }
}

impl std::error::Error for DiscError {}

/// Uniform staggered grid on `[0, ell]`: `n` cells, `n+1` primal nodes,
/// `n` dual nodes at cell midpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub h: f64,
    pub ell: f64,
}

impl Grid1D {
    pub fn new(ell: f64, n: usize) -> Result<Self, DiscError> {
        if n < 4 {
            return Err(DiscError::GridTooCoarse { n });
        }
        Ok(Grid1D {
            n,
            h: ell / n as f64,
            ell,
        })
    }

    pub fn primal(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn dual(&self, c: usize) -> f64 {
        (c as f64 + 0.5) * self.h
    }
}

/// Grids for both components.
pub fn build_grids(
    p: &ValidatedParams,
    n1: usize,
    n2: usize,
) -> Result<(Grid1D, Grid1D), DiscError> {
    Ok((Grid1D::new(p.ell1, n1)?, Grid1D::new(p.ell2, n2)?))
}

/// Whether the heat coupling is kept or the system is reduced to its
/// conservative elastic core (coupling coefficients zero, flux block
/// removed), which is skew-adjoint in the energy inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Full,
    ConservativeCore,
}

/// Block layout of the state vector.
///
/// Fixed block order: S1 `[u1 | v1 | theta | q | u2 | v2]`,
/// S2 `[u1 | v1 | u2 | v2 | theta | q]`. The `u1`/`v1` blocks hold string
/// nodes `0..n1-1` (node 0 is the shared interface DOF, node `n1` is the
/// eliminated Dirichlet end); `u2`/`v2` hold beam nodes `1..n2-1` (node 0
/// aliased to the interface, node `n2` eliminated). `theta` holds interior
/// nodes of the damped component, `q` its dual nodes.
#[derive(Debug, Clone)]
pub struct Layout {
    pub kind: SystemKind,
    pub coupling: Coupling,
    pub n1: usize,
    pub n2: usize,
    pub u1: Range<usize>,
    pub v1: Range<usize>,
    pub theta: Range<usize>,
    pub q: Range<usize>,
    pub u2: Range<usize>,
    pub v2: Range<usize>,
    pub total: usize,
}

impl Layout {
    fn new(kind: SystemKind, coupling: Coupling, n1: usize, n2: usize) -> Self {
        let nd = match kind {
            SystemKind::S1ThermoStringElasticBeam => n1,
            SystemKind::S2ElasticStringThermoBeam => n2,
        };
        let n_theta = nd - 1;
        let n_q = if coupling == Coupling::Full { nd } else { 0 };
        let mut off = 0usize;
        let mut take = |len: usize| {
            let r = off..off + len;
            off += len;
            r
        };
        let (u1, v1, theta, q, u2, v2) = match kind {
            SystemKind::S1ThermoStringElasticBeam => {
                let u1 = take(n1);
                let v1 = take(n1);
                let theta = take(n_theta);
                let q = take(n_q);
                let u2 = take(n2 - 1);
                let v2 = take(n2 - 1);
                (u1, v1, theta, q, u2, v2)
            }
            SystemKind::S2ElasticStringThermoBeam => {
                let u1 = take(n1);
                let v1 = take(n1);
                let u2 = take(n2 - 1);
                let v2 = take(n2 - 1);
                let theta = take(n_theta);
                let q = take(n_q);
                (u1, v1, theta, q, u2, v2)
            }
        };
        Layout {
            kind,
            coupling,
            n1,
            n2,
            u1,
            v1,
            theta,
            q,
            u2,
            v2,
            total: off,
        }
    }

    /// Index of `u1` at string node `i`; `None` for the eliminated end.
    pub fn iu1(&self, i: usize) -> Option<usize> {
        (i < self.n1).then(|| self.u1.start + i)
    }

    pub fn iv1(&self, i: usize) -> Option<usize> {
        (i < self.n1).then(|| self.v1.start + i)
    }

    /// Index of the beam displacement at beam node `j`; node 0 resolves to
    /// the shared interface DOF in the `u1` block.
    pub fn iu2(&self, j: usize) -> Option<usize> {
        if j == 0 {
            Some(self.u1.start)
        } else if j < self.n2 {
            Some(self.u2.start + j - 1)
        } else {
            None
        }
    }

    pub fn iv2(&self, j: usize) -> Option<usize> {
        if j == 0 {
            Some(self.v1.start)
        } else if j < self.n2 {
            Some(self.v2.start + j - 1)
        } else {
            None
        }
    }

    /// Index of `theta` at interior node `m` (1-based up to `nd - 1`) of the
    /// damped component.
    pub fn itheta(&self, m: usize) -> Option<usize> {
        (m >= 1 && m - 1 < self.theta.len()).then(|| self.theta.start + m - 1)
    }

    /// Index of the flux at dual cell `c` of the damped component.
    pub fn iq(&self, c: usize) -> Option<usize> {
        (c < self.q.len()).then(|| self.q.start + c)
    }

    /// Cell count of the damped component.
    pub fn damped_cells(&self) -> usize {
        match self.kind {
            SystemKind::S1ThermoStringElasticBeam => self.n1,
            SystemKind::S2ElasticStringThermoBeam => self.n2,
        }
    }
}

/// A real state in the block layout of its generator.
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: Arc<Layout>,
    pub data: Vec<f64>,
}

impl StateVector {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let data = vec![0.0; layout.total];
        StateVector { layout, data }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn u1(&self) -> &[f64] {
        &self.data[self.layout.u1.clone()]
    }
    pub fn v1(&self) -> &[f64] {
        &self.data[self.layout.v1.clone()]
    }
    pub fn theta(&self) -> &[f64] {
        &self.data[self.layout.theta.clone()]
    }
    pub fn q(&self) -> &[f64] {
        &self.data[self.layout.q.clone()]
    }
    pub fn u2(&self) -> &[f64] {
        &self.data[self.layout.u2.clone()]
    }
    pub fn v2(&self) -> &[f64] {
        &self.data[self.layout.v2.clone()]
    }

    /// The shared interface displacement.
    pub fn interface_displacement(&self) -> f64 {
        self.data[self.layout.u1.start]
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }
}

/// Profiles used to sample a state (or right-hand side) onto the grid.
/// Missing entries sample as zero. The shared interface DOF takes the value
/// `u1(0)`; callers are responsible for `u1(0) == u2(0)` when both are given.
#[derive(Default)]
pub struct SampleFns<'a> {
    pub u1: Option<&'a dyn Fn(f64) -> f64>,
    pub v1: Option<&'a dyn Fn(f64) -> f64>,
    pub theta: Option<&'a dyn Fn(f64) -> f64>,
    pub q: Option<&'a dyn Fn(f64) -> f64>,
    pub u2: Option<&'a dyn Fn(f64) -> f64>,
    pub v2: Option<&'a dyn Fn(f64) -> f64>,
}

/// The assembled semi-discrete generator `A_h` together with the energy
/// Gram matrix defining `<.,.>_M`.
///
/// Both matrices are stored banded under an interleaved-by-node ordering
/// (all unknowns of a spatial node adjacent, string nodes walking toward the
/// interface, then the beam), which keeps the bandwidth independent of the
/// grid size. Public operations accept and return block-layout states.
pub struct BlockGenerator {
    pub params: ValidatedParams,
    pub kind: SystemKind,
    pub coupling: Coupling,
    pub grid1: Grid1D,
    pub grid2: Grid1D,
    layout: Arc<Layout>,
    weights: WeightSet,
    diss_coeff: f64,
    a_band: BandedMatrix<f64>,
    gram_band: BandedMatrix<f64>,
    /// block index -> interleaved index
    perm: Vec<usize>,
}

impl BlockGenerator {
    pub fn layout(&self) -> Arc<Layout> {
        Arc::clone(&self.layout)
    }

    pub fn dim(&self) -> usize {
        self.layout.total
    }

    pub fn weights(&self) -> WeightSet {
        self.weights
    }

    /// `gamma/kappa` of the damped component.
    pub fn dissipation_coefficient(&self) -> f64 {
        self.diss_coeff
    }

    pub fn zero_state(&self) -> StateVector {
        StateVector::zeros(self.layout())
    }

    /// Generator matrix in the interleaved banded form.
    pub fn a_interleaved(&self) -> &BandedMatrix<f64> {
        &self.a_band
    }

    /// Energy Gram matrix in the interleaved banded form.
    pub fn gram_interleaved(&self) -> &BandedMatrix<f64> {
        &self.gram_band
    }

    /// Energy metric over interleaved vectors.
    pub fn metric(&self) -> Metric {
        Metric::banded(self.gram_band.clone()).expect("energy Gram matrix is SPD")
    }

    pub fn to_interleaved<T: Scalar>(&self, block: &[T]) -> Vec<T> {
        assert_eq!(block.len(), self.layout.total);
        let mut out = vec![T::ZERO; block.len()];
        for (b, &p) in self.perm.iter().enumerate() {
            out[p] = block[b];
        }
        out
    }

    pub fn from_interleaved<T: Scalar>(&self, inter: &[T]) -> Vec<T> {
        assert_eq!(inter.len(), self.layout.total);
        let mut out = vec![T::ZERO; inter.len()];
        for (b, &p) in self.perm.iter().enumerate() {
            out[b] = inter[p];
        }
        out
    }

    fn check_dim(&self, len: usize) -> Result<(), DiscError> {
        if len != self.layout.total {
            return Err(DiscError::DimensionMismatch {
                expected: self.layout.total,
                got: len,
            });
        }
        Ok(())
    }

    /// Energy inner product `<y, z>_M` over block-layout vectors; for complex
    /// scalars the second argument is conjugated.
    pub fn energy_inner<T: Scalar>(&self, y: &[T], z: &[T]) -> T {
        assert_eq!(y.len(), self.layout.total);
        assert_eq!(z.len(), self.layout.total);
        let l = &self.layout;
        let w = &self.weights;
        let h1 = self.grid1.h;
        let h2 = self.grid2.h;
        let hd = match self.kind {
            SystemKind::S1ThermoStringElasticBeam => h1,
            SystemKind::S2ElasticStringThermoBeam => h2,
        };
        let at = |v: &[T], idx: Option<usize>| idx.map_or(T::ZERO, |i| v[i]);
        let mut acc = T::ZERO;

        // String gradient block, midpoint rule on the dual cells.
        for c in 0..l.n1 {
            let gy = (at(y, l.iu1(c + 1)) - at(y, l.iu1(c))).scale(1.0 / h1);
            let gz = (at(z, l.iu1(c + 1)) - at(z, l.iu1(c))).scale(1.0 / h1);
            acc += (gy * gz.conj()).scale(w.du1 * h1);
        }
        // Beam bending block.
        for m in 0..l.n2 {
            let ky = self.beam_second_difference(y, m);
            let kz = self.beam_second_difference(z, m);
            let wk = if m == 0 { h2 / 2.0 } else { h2 };
            acc += (ky * kz.conj()).scale(w.d2u2 * wk);
        }
        // Velocities, trapezoid on both components with the shared node
        // carrying both kinetic weights.
        for i in 0..l.n1 {
            let wi = if i == 0 {
                w.v1 * h1 / 2.0 + w.v2 * h2 / 2.0
            } else {
                w.v1 * h1
            };
            let a = y[l.iv1(i).unwrap()];
            let b = z[l.iv1(i).unwrap()];
            acc += (a * b.conj()).scale(wi);
        }
        for j in 1..l.n2 {
            let a = y[l.iv2(j).unwrap()];
            let b = z[l.iv2(j).unwrap()];
            acc += (a * b.conj()).scale(w.v2 * h2);
        }
        // Temperature (interior trapezoid) and flux (midpoint).
        for t in l.theta.clone() {
            acc += (y[t] * z[t].conj()).scale(w.theta * hd);
        }
        for c in l.q.clone() {
            acc += (y[c] * z[c].conj()).scale(w.q * hd);
        }
        acc
    }

    /// Second difference of the beam displacement at beam node `m`,
    /// with the clamped-slope ghost at the interface and the eliminated
    /// Dirichlet end built in.
    fn beam_second_difference<T: Scalar>(&self, y: &[T], m: usize) -> T {
        let l = &self.layout;
        let h2 = self.grid2.h;
        let at = |idx: Option<usize>| idx.map_or(T::ZERO, |i| y[i]);
        let inv = 1.0 / (h2 * h2);
        if m == 0 {
            (at(l.iu2(1)) - at(l.iu2(0))).scale(2.0 * inv)
        } else {
            (at(l.iu2(m - 1)) - at(l.iu2(m)).scale(2.0) + at(l.iu2(m + 1))).scale(inv)
        }
    }

    /// `1/2 ||y||_M^2`, the second-order quadrature of the physical energy.
    pub fn energy(&self, y: &StateVector) -> Result<f64, DiscError> {
        self.check_dim(y.len())?;
        Ok(0.5 * self.energy_inner(&y.data, &y.data))
    }

    /// `(gamma/kappa) ||q||^2` under the flux-block quadrature; this is the
    /// exact negative of `Re <A_h y, y>_M`.
    pub fn dissipation(&self, y: &StateVector) -> Result<f64, DiscError> {
        self.check_dim(y.len())?;
        Ok(self.dissipation_of(&y.data))
    }

    pub fn dissipation_of<T: Scalar>(&self, y: &[T]) -> f64 {
        let l = &self.layout;
        let hd = match self.kind {
            SystemKind::S1ThermoStringElasticBeam => self.grid1.h,
            SystemKind::S2ElasticStringThermoBeam => self.grid2.h,
        };
        let mut acc = 0.0;
        for c in l.q.clone() {
            acc += y[c].modulus().powi(2) * hd;
        }
        self.diss_coeff * acc
    }

    /// Applies the generator: `A_h y`.
    pub fn apply(&self, y: &StateVector) -> Result<StateVector, DiscError> {
        self.check_dim(y.len())?;
        let inter = self.to_interleaved(&y.data);
        let out = self.a_band.matvec(&inter);
        Ok(StateVector {
            layout: self.layout(),
            data: self.from_interleaved(&out),
        })
    }

    /// Solves the stationary problem `A_h y = f`.
    pub fn solve_stationary(&self, f: &StateVector) -> Result<StateVector, DiscError> {
        self.check_dim(f.len())?;
        let lu = self
            .a_band
            .lu()
            .map_err(|_| DiscError::SingularGenerator)?;
        let b = self.to_interleaved(&f.data);
        let x = lu.solve(&b).map_err(|_| DiscError::SingularGenerator)?;
        Ok(StateVector {
            layout: self.layout(),
            data: self.from_interleaved(&x),
        })
    }

    /// LU factors of `I - c A_h` in the interleaved ordering. Used by the
    /// time stepper, which factors once per `(generator, dt)` pair.
    pub fn factor_shifted_identity(&self, c: f64) -> Result<LuFactors<f64>, DiscError> {
        let n = self.layout.total;
        let (kl, ku) = self.a_band.bandwidths();
        let mut m = BandedMatrix::zeros(n, n, kl, ku);
        for i in 0..n {
            for j in self.a_band.row_range(i) {
                *m.entry_mut(i, j) = -c * self.a_band.get(i, j);
            }
            *m.entry_mut(i, i) += 1.0;
        }
        m.lu().map_err(|_| DiscError::SingularGenerator)
    }

    /// Samples profiles into a block-layout state.
    pub fn sample_state(&self, fns: &SampleFns<'_>) -> StateVector {
        let l = &self.layout;
        let g1 = self.grid1;
        let g2 = self.grid2;
        let mut y = StateVector::zeros(self.layout());
        if let Some(f) = fns.u1 {
            for i in 0..l.n1 {
                y.data[l.iu1(i).unwrap()] = f(g1.primal(i));
            }
        }
        if let Some(f) = fns.v1 {
            for i in 0..l.n1 {
                y.data[l.iv1(i).unwrap()] = f(g1.primal(i));
            }
        }
        if let Some(f) = fns.u2 {
            for j in 1..l.n2 {
                y.data[l.iu2(j).unwrap()] = f(g2.primal(j));
            }
        }
        if let Some(f) = fns.v2 {
            for j in 1..l.n2 {
                y.data[l.iv2(j).unwrap()] = f(g2.primal(j));
            }
        }
        let gd = match self.kind {
            SystemKind::S1ThermoStringElasticBeam => g1,
            SystemKind::S2ElasticStringThermoBeam => g2,
        };
        if let Some(f) = fns.theta {
            for m in 1..l.theta.len() + 1 {
                y.data[l.itheta(m).unwrap()] = f(gd.primal(m));
            }
        }
        if let Some(f) = fns.q {
            for c in 0..l.q.len() {
                y.data[l.iq(c).unwrap()] = f(gd.dual(c));
            }
        }
        y
    }
}

/// Assembles the semi-discrete generator for the selected system.
pub fn assemble_generator(
    p: &ValidatedParams,
    kind: SystemKind,
    grids: (Grid1D, Grid1D),
    coupling: Coupling,
) -> Result<BlockGenerator, DiscError> {
    let (g1, g2) = grids;
    if (g1.h * g1.n as f64 - g1.ell).abs() > 1e-12 * g1.ell
        || (g2.h * g2.n as f64 - g2.ell).abs() > 1e-12 * g2.ell
    {
        return Err(DiscError::AssemblyError(
            "grid spacing inconsistent with length".into(),
        ));
    }
    if (g1.ell - p.ell1).abs() > 1e-12 * p.ell1 || (g2.ell - p.ell2).abs() > 1e-12 * p.ell2 {
        return Err(DiscError::AssemblyError(
            "grids do not span the component lengths".into(),
        ));
    }
    let layout = Arc::new(Layout::new(kind, coupling, g1.n, g2.n));
    let w = energy_weights(p, kind);
    let h1 = g1.h;
    let h2 = g2.h;
    let n1 = g1.n;
    let n2 = g2.n;
    let full = coupling == Coupling::Full;

    // Kinetic (velocity) mass: trapezoid per component, shared node merged.
    let mut mv = vec![0.0; layout.total];
    mv[layout.iv1(0).unwrap()] = w.v1 * h1 / 2.0 + w.v2 * h2 / 2.0;
    for i in 1..n1 {
        mv[layout.iv1(i).unwrap()] = w.v1 * h1;
    }
    for j in 1..n2 {
        mv[layout.iv2(j).unwrap()] = w.v2 * h2;
    }

    // Beam bending rows: (node, quadrature weight, stencil over beam nodes).
    let beam_rows: Vec<(f64, Vec<(usize, f64)>)> = (0..n2)
        .map(|m| {
            let wk = if m == 0 { h2 / 2.0 } else { h2 };
            let inv = 1.0 / (h2 * h2);
            let stencil = if m == 0 {
                vec![(0, -2.0 * inv), (1, 2.0 * inv)]
            } else {
                vec![(m - 1, inv), (m, -2.0 * inv), (m + 1, inv)]
            };
            (wk, stencil)
        })
        .collect();

    // Stiffness S = du1 * G^T W G (string) + d2u2 * K^T W K (beam), on the
    // displacement DOFs with the shared interface column/row merged.
    let mut stiff: Vec<(usize, usize, f64)> = Vec::new();
    for c in 0..n1 {
        let pair = [(c, -1.0 / h1), (c + 1, 1.0 / h1)];
        for &(a, ga) in &pair {
            let Some(ia) = layout.iu1(a) else { continue };
            for &(b, gb) in &pair {
                let Some(ib) = layout.iu1(b) else { continue };
                stiff.push((ia, ib, w.du1 * h1 * ga * gb));
            }
        }
    }
    for (wk, stencil) in &beam_rows {
        for &(a, ka) in stencil {
            let Some(ia) = layout.iu2(a) else { continue };
            for &(b, kb) in stencil {
                let Some(ib) = layout.iu2(b) else { continue };
                stiff.push((ia, ib, w.d2u2 * wk * ka * kb));
            }
        }
    }

    // Thermo-elastic coupling block P (velocity row gets +P theta, the
    // temperature row its exact negative transpose).
    let mut coup: Vec<(usize, usize, f64)> = Vec::new();
    if full {
        match kind {
            SystemKind::S1ThermoStringElasticBeam => {
                // Stress form on the string: the cell-averaged temperature
                // enters the stress, delta1 <avg theta, G phi>.
                for c in 0..n1 {
                    for (t, _) in [(c, 0), (c + 1, 0)] {
                        let Some(it) = layout.itheta(t) else { continue };
                        for (i, si) in [(c, -1.0), (c + 1, 1.0)] {
                            let Some(iv) = layout.iv1(i) else { continue };
                            coup.push((iv, it, p.delta1 * 0.5 * si));
                        }
                    }
                }
            }
            SystemKind::S2ElasticStringThermoBeam => {
                // Bending-moment form on the beam: delta2 <theta, K phi>.
                for (m, (wk, stencil)) in beam_rows.iter().enumerate() {
                    let Some(it) = layout.itheta(m) else { continue };
                    for &(a, ka) in stencil {
                        let Some(iv) = layout.iv2(a) else { continue };
                        coup.push((iv, it, p.delta2 * wk * ka));
                    }
                }
            }
        }
    }

    let mut a: Vec<(usize, usize, f64)> = Vec::new();

    // u' = v on every displacement DOF (one shared row for the interface).
    for i in 0..n1 {
        a.push((layout.iu1(i).unwrap(), layout.iv1(i).unwrap(), 1.0));
    }
    for j in 1..n2 {
        a.push((layout.iu2(j).unwrap(), layout.iv2(j).unwrap(), 1.0));
    }

    // v' = M_V^{-1} (-S u + P theta)
    for &(ia, ib, s) in &stiff {
        a.push((ia_to_v(&layout, ia), ib, -s / mv[ia_to_v(&layout, ia)]));
    }
    for &(iv, it, c) in &coup {
        a.push((iv, it, c / mv[iv]));
    }

    // theta' = -(1/(w_theta h_d)) (P^T v + gamma * adjoint-gradient of q)
    // q'     = -(1/tau) q - (kappa/tau) G theta
    let (hd, gamma, kappa, tau) = match kind {
        SystemKind::S1ThermoStringElasticBeam => (h1, p.gamma1, p.kappa1, p.tau1),
        SystemKind::S2ElasticStringThermoBeam => (h2, p.gamma2, p.kappa2, p.tau2),
    };
    if full {
        let w_theta_row = 1.0 / (w.theta * hd);
        for &(iv, it, c) in &coup {
            a.push((it, iv, -c * w_theta_row));
        }
        let nd = layout.damped_cells();
        for t in 1..nd {
            let it = layout.itheta(t).unwrap();
            // dual->primal gradient of the flux
            a.push((it, layout.iq(t).unwrap(), -gamma / hd));
            a.push((it, layout.iq(t - 1).unwrap(), gamma / hd));
        }
        for c in 0..nd {
            let ic = layout.iq(c).unwrap();
            a.push((ic, ic, -1.0 / tau));
            // primal->dual gradient of the temperature, Dirichlet ends zero
            if let Some(it) = layout.itheta(c + 1) {
                a.push((ic, it, -kappa / (tau * hd)));
            }
            if c >= 1 {
                if let Some(it) = layout.itheta(c) {
                    a.push((ic, it, kappa / (tau * hd)));
                }
            }
        }
    }

    // Energy Gram matrix: stiffness on displacements, diagonal elsewhere.
    let mut gram: Vec<(usize, usize, f64)> = stiff.clone();
    for i in 0..n1 {
        let iv = layout.iv1(i).unwrap();
        gram.push((iv, iv, mv[iv]));
    }
    for j in 1..n2 {
        let iv = layout.iv2(j).unwrap();
        gram.push((iv, iv, mv[iv]));
    }
    for it in layout.theta.clone() {
        gram.push((it, it, w.theta * hd));
    }
    for ic in layout.q.clone() {
        gram.push((ic, ic, w.q * hd));
    }

    // Interleaved-by-node ordering keeps both matrices banded.
    let perm = interleave(&layout);
    let permute = |tri: &[(usize, usize, f64)]| -> Vec<(usize, usize, f64)> {
        tri.iter().map(|&(i, j, v)| (perm[i], perm[j], v)).collect()
    };
    let a_band = BandedMatrix::from_triplets(layout.total, layout.total, &permute(&a));
    let gram_band = BandedMatrix::from_triplets(layout.total, layout.total, &permute(&gram));

    Ok(BlockGenerator {
        params: *p,
        kind,
        coupling,
        grid1: g1,
        grid2: g2,
        layout,
        weights: w,
        diss_coeff: if full {
            dissipation_coefficient(p, kind)
        } else {
            0.0
        },
        a_band,
        gram_band,
        perm,
    })
}

/// Maps a displacement DOF index to the matching velocity DOF index.
fn ia_to_v(l: &Layout, iu: usize) -> usize {
    if l.u1.contains(&iu) {
        l.v1.start + (iu - l.u1.start)
    } else {
        debug_assert!(l.u2.contains(&iu));
        l.v2.start + (iu - l.u2.start)
    }
}

/// Interleaved node ordering: string nodes descending to the interface, the
/// interface group, then beam nodes ascending. Each node's unknowns stay
/// adjacent, so every stencil spans a bounded index range.
fn interleave(l: &Layout) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::with_capacity(l.total);
    let s1 = l.kind == SystemKind::S1ThermoStringElasticBeam;
    for i in (1..l.n1).rev() {
        order.push(l.iu1(i).unwrap());
        order.push(l.iv1(i).unwrap());
        if s1 {
            if let Some(it) = l.itheta(i) {
                order.push(it);
            }
            if let Some(ic) = l.iq(i) {
                order.push(ic);
            }
        }
    }
    order.push(l.iu1(0).unwrap());
    order.push(l.iv1(0).unwrap());
    if let Some(ic) = l.iq(0) {
        order.push(ic);
    }
    for j in 1..l.n2 {
        order.push(l.iu2(j).unwrap());
        order.push(l.iv2(j).unwrap());
        if !s1 {
            if let Some(it) = l.itheta(j) {
                order.push(it);
            }
            if let Some(ic) = l.iq(j) {
                order.push(ic);
            }
        }
    }
    debug_assert_eq!(order.len(), l.total);
    let mut perm = vec![0usize; l.total];
    for (pos, &blk) in order.iter().enumerate() {
        perm[blk] = pos;
    }
    perm
}

/// Convenience: assemble with the full heat coupling.
pub fn assemble_full(
    p: &ValidatedParams,
    kind: SystemKind,
    n1: usize,
    n2: usize,
) -> Result<BlockGenerator, DiscError> {
    assemble_generator(p, kind, build_grids(p, n1, n2)?, Coupling::Full)
}

/// Interleaved complex helpers used by the spectral module.
impl BlockGenerator {
    pub fn energy_norm_complex(&self, y: &[Complex64]) -> f64 {
        self.energy_inner(y, y).re.max(0.0).sqrt()
    }
}
