//! Banded matrix storage and LU factorization with partial pivoting.

use super::LinalgError;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar kinds the banded kernels are generic over: `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const ZERO: Self;
    const ONE: Self;
    fn conj(self) -> Self;
    /// Modulus (absolute value).
    fn modulus(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    const ZERO: f64 = 0.0;
    const ONE: f64 = 1.0;
    fn conj(self) -> f64 {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_re(x: f64) -> f64 {
        x
    }
    fn scale(self, s: f64) -> f64 {
        self * s
    }
}

impl Scalar for Complex64 {
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    fn conj(self) -> Complex64 {
        Complex64::new(self.re, -self.im)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    fn scale(self, s: f64) -> Complex64 {
        Complex64::new(self.re * s, self.im * s)
    }
}

/// Row-major banded storage: row `i` holds columns `i - kl ..= i + ku`.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(rows: usize, cols: usize, kl: usize, ku: usize) -> Self {
        let width = kl + ku + 1;
        BandedMatrix {
            rows,
            cols,
            kl,
            ku,
            width,
            data: vec![T::ZERO; rows * width],
        }
    }

    /// Builds a banded matrix from (row, col, value) triplets, accumulating
    /// duplicates. Bandwidths are the tightest that cover all triplets.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for &(i, j, _) in triplets {
            assert!(i < rows && j < cols, "triplet ({i},{j}) out of bounds");
            kl = kl.max(i.saturating_sub(j));
            ku = ku.max(j.saturating_sub(i));
        }
        let mut m = Self::zeros(rows, cols, kl, ku);
        for &(i, j, v) in triplets {
            *m.entry_mut(i, j) += v;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n, 0, 0);
        for i in 0..n {
            m.data[i] = T::ONE;
        }
        m
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len(), 0, 0);
        m.data.copy_from_slice(d);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.in_band(i, j));
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i < self.rows && j < self.cols && self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::ZERO
        }
    }

    /// Mutable access inside the band; panics outside it.
    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut T {
        assert!(
            i < self.rows && j < self.cols && self.in_band(i, j),
            "entry ({i},{j}) outside band"
        );
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    /// Column range of row `i` intersected with the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku + 1).min(self.cols);
        lo..hi
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut y = vec![T::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = T::ZERO;
            for j in self.row_range(i) {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.row_range(i)
                    .map(|j| self.data[self.idx(i, j)].modulus())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::ZERO; self.cols]; self.rows];
        for i in 0..self.rows {
            for j in self.row_range(i) {
                d[i][j] = self.data[self.idx(i, j)];
            }
        }
        d
    }

    /// Applies `x -> scale * x` to every stored entry.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.scale(s);
        }
        out
    }
}

impl BandedMatrix<f64> {
    /// `scale * A + shift * I` as a complex banded matrix. Used to form the
    /// shifted operators for resolvent and eigen solves.
    pub fn complex_shifted(&self, scale: f64, shift: Complex64) -> BandedMatrix<Complex64> {
        assert_eq!(self.rows, self.cols);
        let mut out = BandedMatrix::<Complex64>::zeros(self.rows, self.cols, self.kl, self.ku);
        for i in 0..self.rows {
            for j in self.row_range(i) {
                let k = out.idx(i, j);
                out.data[k] = Complex64::new(self.data[self.idx(i, j)] * scale, 0.0);
            }
            let k = out.idx(i, i);
            out.data[k] += shift;
        }
        out
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in self.row_range(i) {
                acc += x[j].scale(self.data[self.idx(i, j)]);
            }
            y[i] = acc;
        }
        y
    }
}

/// Pivot magnitudes below this are treated as exact singularity.
const PIVOT_FLOOR: f64 = 1e-300;

/// Packed LU factors of a banded matrix, `P A = L U`.
///
/// Partial pivoting widens the upper band to `kl + ku`; storage per row is
/// `2*kl + ku + 1`. Multipliers are stored below the diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors<T: Scalar> {
    n: usize,
    kl: usize,
    /// Upper bandwidth of U including pivoting fill.
    kuf: usize,
    width: usize,
    data: Vec<T>,
    /// Row swapped with `k` at elimination step `k`.
    pivots: Vec<usize>,
    growth: f64,
}

impl<T: Scalar> LuFactors<T> {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kuf);
        i * self.width + (j + self.kl - i)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ratio of the largest factored entry to the largest input entry.
    pub fn growth_factor(&self) -> f64 {
        self.growth
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        let n = self.n;
        // Forward: apply P and L^{-1}.
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            let rmax = (k + self.kl).min(n - 1);
            for r in k + 1..=rmax {
                let m = self.data[self.idx(r, k)];
                x[r] -= m * xk;
            }
        }
        // Backward: U x = y.
        for i in (0..n).rev() {
            let jmax = (i + self.kuf).min(n - 1);
            let mut acc = x[i];
            for j in i + 1..=jmax {
                acc -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = acc / self.data[self.idx(i, i)];
        }
    }

    /// Solves `A^H x = b` with the same factors.
    pub fn solve_conj_transpose(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        let n = self.n;
        let mut x = b.to_vec();
        // U^H y = b (lower triangular, bandwidth kuf).
        for i in 0..n {
            let jmin = i.saturating_sub(self.kuf);
            let mut acc = x[i];
            for j in jmin..i {
                acc -= self.data[self.idx(j, i)].conj() * x[j];
            }
            x[i] = acc / self.data[self.idx(i, i)].conj();
        }
        // L^H z = y (unit upper triangular, bandwidth kl).
        for i in (0..n).rev() {
            let jmax = (i + self.kl).min(n - 1);
            let mut acc = x[i];
            for j in i + 1..=jmax {
                acc -= self.data[self.idx(j, i)].conj() * x[j];
            }
            x[i] = acc;
        }
        // x = P^T z: undo the swaps in reverse order.
        for k in (0..n).rev() {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
        }
        Ok(x)
    }
}

/// Banded LU factorization with partial pivoting.
pub fn lu_factor<T: Scalar>(a: &BandedMatrix<T>) -> Result<LuFactors<T>, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::NotSquare);
    }
    let n = a.rows();
    let (kl, ku) = a.bandwidths();
    let kuf = (kl + ku).min(n.saturating_sub(1));
    let kl = kl.min(n.saturating_sub(1));
    let width = kl + kuf + 1;
    let mut f = LuFactors {
        n,
        kl,
        kuf,
        width,
        data: vec![T::ZERO; n * width],
        pivots: vec![0; n],
        growth: 0.0,
    };
    let mut amax = 0.0f64;
    for i in 0..n {
        for j in a.row_range(i) {
            let v = a.get(i, j);
            amax = amax.max(v.modulus());
            let k = f.idx(i, j);
            f.data[k] = v;
        }
    }

    let mut umax = 0.0f64;
    for k in 0..n {
        let rmax = (k + kl).min(n - 1);
        // Pivot search in column k.
        let mut p = k;
        let mut pmag = f.data[f.idx(k, k)].modulus();
        for r in k + 1..=rmax {
            let m = f.data[f.idx(r, k)].modulus();
            if m > pmag {
                p = r;
                pmag = m;
            }
        }
        if !(pmag > PIVOT_FLOOR) {
            return Err(LinalgError::SingularMatrix);
        }
        f.pivots[k] = p;
        let jmax = (k + kuf).min(n - 1);
        if p != k {
            for j in k..=jmax {
                let ik = f.idx(k, j);
                let ip = f.idx(p, j);
                f.data.swap(ik, ip);
            }
        }
        let dk = f.data[f.idx(k, k)];
        umax = umax.max(dk.modulus());
        for r in k + 1..=rmax {
            let ik = f.idx(r, k);
            let m = f.data[ik] / dk;
            f.data[ik] = m;
            for j in k + 1..=jmax {
                let kj = f.idx(k, j);
                let rj = f.idx(r, j);
                let upd = m * f.data[kj];
                f.data[rj] -= upd;
            }
        }
        for j in k + 1..=jmax {
            umax = umax.max(f.data[f.idx(k, j)].modulus());
        }
    }
    f.growth = if amax > 0.0 { umax / amax } else { 1.0 };
    Ok(f)
}

impl<T: Scalar> BandedMatrix<T> {
    /// Convenience wrapper around [`lu_factor`].
    pub fn lu(&self) -> Result<LuFactors<T>, LinalgError> {
        lu_factor(self)
    }
}
