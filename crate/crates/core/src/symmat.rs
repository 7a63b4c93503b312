//! Dense symmetric matrices, real and complex.
//!
//! Sizes here are a few dozen at most, so everything is stored row-major in a
//! flat `Vec` with both triangles present. Writes go through [`SymmetricMatrix::set`],
//! which updates both positions, so symmetry is exact.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::logscalar::LogScalar;
use crate::{Error, Result};

/// Relative pivot threshold for positive definiteness: a Cholesky pivot must exceed
/// this times the largest diagonal entry.
pub const PD_RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.n + i] = d;
        }
        m
    }

    /// Builds from a row-major buffer that must be exactly symmetric.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_row_major_tol(n, data, 0.0)
    }

    /// Builds from a row-major buffer whose asymmetry is at most `tol`; the result is
    /// the average of the buffer and its transpose.
    pub fn from_row_major_tol(n: usize, mut data: Vec<f64>, tol: f64) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                worst = worst.max(libm::fabs(a - b));
                let avg = 0.5 * (a + b);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        if worst > tol || data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(Self { n, data })
    }

    /// Builds from the lower triangle given by `f(i, j)` with `j <= i`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max(libm::fabs(a - b)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, data })
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::new(self)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    pub fn logdet(&self) -> Result<f64> {
        Ok(self.cholesky()?.logdet())
    }

    /// Inverse of a positive-definite matrix.
    pub fn inverse(&self) -> Result<Self> {
        Ok(self.cholesky()?.inverse())
    }

    /// Rows and columns restricted to `idx`, in the order given.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index: bad, n: self.n });
        }
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Ok(Self { n: k, data })
    }

    /// Writes `block` into the rows/columns `idx`.
    pub fn set_block(&mut self, idx: &[usize], block: &Self) {
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                self.data[i * self.n + j] = block.get(a, b);
            }
        }
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn new(a: &SymmetricMatrix) -> Result<Self> {
        let n = a.dim();
        let max_diag = (0..n).map(|i| a.get(i, i)).fold(0.0f64, f64::max);
        let threshold = PD_RELATIVE_TOLERANCE * max_diag;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut pivot = a.get(j, j);
            for k in 0..j {
                pivot -= l[j * n + k] * l[j * n + k];
            }
            if !(pivot > threshold) || max_diag <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = libm::sqrt(pivot);
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of the lower factor.
    pub fn factor(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn logdet(&self) -> f64 {
        2.0 * (0..self.n).map(|i| libm::log(self.l[i * self.n + i])).sum::<f64>()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn inverse(&self) -> SymmetricMatrix {
        let n = self.n;
        let mut inv = SymmetricMatrix::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            self.solve_in_place(&mut col);
            for i in j..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }
}

/// Complex symmetric (not Hermitian) matrix: `entry(i, j) == entry(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymmetricMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexSymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_real(a: &SymmetricMatrix) -> Self {
        Self { n: a.dim(), data: a.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    /// `d + i t E` where `E` has ones at the two positions of `p.edge`.
    pub fn perturbed(d: &SymmetricMatrix, p: &PerturbationEdge) -> Result<Self> {
        let (u, v) = p.edge;
        for w in [u, v] {
            if w >= d.dim() {
                return Err(Error::IndexOutOfRange { index: w, n: d.dim() });
            }
        }
        let mut m = Self::from_real(d);
        let z = m.get(u, v) + Complex64::new(0.0, p.t);
        m.set(u, v, z);
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index: bad, n: self.n });
        }
        let mut data = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Ok(Self { n: idx.len(), data })
    }

    /// Log-determinant by unpivoted LU, summing the principal logarithm of each pivot.
    ///
    /// When the Hermitian part is positive definite (the case `D + iS` with `D`
    /// PD and `S` real symmetric) every pivot has positive real part, and the sum
    /// is the branch reached continuously from the real matrix `D`. Fails if any
    /// pivot leaves the right half-plane.
    pub fn logdet_continuous(&self) -> Result<LogScalar> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let pivot = a[k * n + k];
            if !(pivot.re > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            total += pivot.ln();
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        Ok(LogScalar::from_complex_ln(total))
    }

    /// Determinant by partially pivoted LU, as a principal-value `LogScalar`.
    pub fn logdet(&self) -> LogScalar {
        let n = self.n;
        let mut a = self.data.clone();
        let mut log_mag = 0.0;
        let mut phase = 0.0;
        for k in 0..n {
            let p =
                (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm())).expect("non-empty range");
            if a[p * n + k].norm() == 0.0 {
                return LogScalar::ZERO;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                phase += core::f64::consts::PI;
            }
            let pivot = a[k * n + k];
            log_mag += libm::log(pivot.norm());
            phase += pivot.arg();
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        LogScalar::new(log_mag, phase)
    }
}

/// A single symmetric off-diagonal perturbation `t` at `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationEdge {
    pub edge: (usize, usize),
    pub t: f64,
}

impl PerturbationEdge {
    pub fn new(u: usize, v: usize, t: f64) -> Result<Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(Self { edge: (u.min(v), u.max(v)), t })
    }

    /// True when both endpoints are in `idx`.
    pub fn within(&self, idx: &[usize]) -> bool {
        idx.contains(&self.edge.0) && idx.contains(&self.edge.1)
    }
}

/// `log det(d)` for positive-definite `d`.
pub fn logdet(d: &SymmetricMatrix) -> Result<f64> {
    d.logdet()
}

/// `log det(d + i t E)` on the branch continuous from `t = 0`.
pub fn complex_logdet(d: &SymmetricMatrix, p: &PerturbationEdge) -> Result<LogScalar> {
    if !d.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    ComplexSymmetricMatrix::perturbed(d, p)?.logdet_continuous()
}

/// Sum of outer products of the rows, optionally about the column means.
pub fn scatter_matrix<R: AsRef<[f64]>>(rows: &[R], centered: bool) -> Result<SymmetricMatrix> {
    let first = rows.first().ok_or(Error::Empty)?;
    let n = first.as_ref().len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut mean = vec![0.0; n];
    for r in rows {
        let r = r.as_ref();
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        if centered {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
    }
    let count = rows.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);
    let mut u = SymmetricMatrix::zeros(n);
    let mut centred = vec![0.0; n];
    for r in rows {
        for (c, (x, m)) in centred.iter_mut().zip(r.as_ref().iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..n {
            for j in 0..=i {
                let v = u.get(i, j) + centred[i] * centred[j];
                u.set(i, j, v);
            }
        }
    }
    Ok(u)
}
