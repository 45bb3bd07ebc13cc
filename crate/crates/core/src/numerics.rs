//! Dense complex linear algebra for the small matrices that appear in
//! two-qubit open-system problems (dimension 16 at most).
//!
//! Everything here is written for clarity over speed: matrices are stored
//! row-major in a flat `Vec`, eigenproblems use Jacobi sweeps or a plain
//! shifted QR iteration, and the SVD is the one-sided Jacobi method, which
//! resolves tiny singular values to high relative accuracy. That last point
//! matters for null-space detection.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Largest dimension accepted by [`eig_general_small`].
pub const MAX_GENERAL_EIG_DIM: usize = 16;

/// Relative threshold (against the max row-sum norm) below which a singular
/// value counts as zero when sizing a null space.
pub const NULL_SPACE_THRESHOLD: f64 = 1e-10;

/// Tolerance used to accept a matrix as Hermitian in [`eig_hermitian`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },
    #[error("constraint row must be nonzero")]
    ZeroConstraint,
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.as_ref().len(), ncols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self { rows: nrows, cols: ncols, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max row-sum norm, the induced infinity norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum elementwise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Elementwise equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    /// `max |A - A^dagger|`; infinite for non-square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y = A x` into a caller-owned buffer.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        m
    }

    /// Conjugation `U A U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Column-stacked vectorization: entry `(i, j)` lands at `i + rows * j`.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                v[i + self.rows * j] = self[(i, j)];
            }
        }
        v
    }

    /// Inverse of [`vectorize`](Self::vectorize) for an `n x n` matrix.
    pub fn unvectorize(v: &[C64], n: usize) -> Self {
        assert_eq!(v.len(), n * n, "vector length must be n^2");
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i + n * j];
            }
        }
        m
    }

    fn col_dot(&self, a: usize, b: usize) -> C64 {
        (0..self.rows).map(|i| self[(i, a)].conj() * self[(i, b)]).sum()
    }

    fn col_norm_sqr(&self, a: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, a)].norm_sqr()).sum()
    }

    /// Right-multiplies columns `p`, `q` by the 2x2 block `j`.
    fn rotate_cols(&mut self, p: usize, q: usize, j: &Rot2) {
        for i in 0..self.rows {
            let a = self[(i, p)];
            let b = self[(i, q)];
            self[(i, p)] = a * j.pp + b * j.qp;
            self[(i, q)] = a * j.pq + b * j.qq;
        }
    }

    /// Left-multiplies rows `p`, `q` by the adjoint of the 2x2 block `j`.
    fn rotate_rows_adjoint(&mut self, p: usize, q: usize, j: &Rot2) {
        for k in 0..self.cols {
            let a = self[(p, k)];
            let b = self[(q, k)];
            self[(p, k)] = j.pp.conj() * a + j.qp.conj() * b;
            self[(q, k)] = j.pq.conj() * a + j.qq.conj() * b;
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    m[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    m
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// A 2x2 unitary block embedded at rows/columns `(p, q)`.
#[derive(Debug, Clone, Copy)]
struct Rot2 {
    pp: C64,
    pq: C64,
    qp: C64,
    qq: C64,
}

/// Unitary `J` with `J^dagger [[a, g], [g*, b]] J` diagonal (`a`, `b` real).
fn jacobi_rotation(a: f64, b: f64, g: C64) -> Rot2 {
    let gabs = g.norm();
    let e = g / gabs;
    let zeta = (b - a) / (2.0 * gabs);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    Rot2 {
        pp: C64::new(c, 0.0),
        pq: C64::new(s, 0.0),
        qp: -e.conj() * s,
        qq: e.conj() * c,
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Rejects input whose Hermitian deviation exceeds
/// `HERMITIAN_TOLERANCE * max(1, max|h|)`.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen, NumericsError> {
    if !h.is_square() {
        return Err(NumericsError::NotSquare { rows: h.rows, cols: h.cols });
    }
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE * h.max_abs().max(1.0) {
        return Err(NumericsError::NotHermitian { deviation });
    }
    let n = h.rows;
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();
    const MAX_SWEEPS: usize = 100;
    let mut converged = scale == 0.0 || n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                if g.norm() == 0.0 {
                    continue;
                }
                let rot = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, g);
                a.rotate_cols(p, q, &rot);
                a.rotate_rows_adjoint(p, q, &rot);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                v.rotate_cols(p, q, &rot);
            }
        }
    }
    if !converged {
        // One more check after the final sweep.
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-13 * scale {
            return Err(NumericsError::NoConvergence { routine: "eig_hermitian", iterations: MAX_SWEEPS });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// reflections (similarity transform, eigenvalues preserved).
fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.rows;
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase * |x| e1, H = I - 2 v v^dagger / (v^dagger v)
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- H A
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= vr * f;
            }
        }
        // A <- A H
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| a[(i, k + 1 + r)] * vr).sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= f * vr.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a general complex square matrix of dimension at most
/// [`MAX_GENERAL_EIG_DIM`].
///
/// Hessenberg reduction followed by single-shift QR with Wilkinson shifts
/// and deflation. The result is sorted by descending real part; values whose
/// real parts agree to `1e-12` relative are ordered by descending imaginary
/// part.
pub fn eig_general_small(a: &ComplexMatrix) -> Result<Vec<C64>, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    if n > MAX_GENERAL_EIG_DIM {
        return Err(NumericsError::TooLarge { dim: n, max: MAX_GENERAL_EIG_DIM });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut eigs = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    let max_iter = 100 * n;
    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let tiny = f64::EPSILON * if diag == 0.0 { scale } else { diag };
            if sub <= tiny {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(NumericsError::NoConvergence { routine: "eig_general_small", iterations: iter });
        }
        let mut mu = wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            mu = h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.25);
        }
        // QR step on the active block via Givens rotations: H - mu I = QR, H <- RQ + mu I.
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots: Vec<(C64, C64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            // G = [[c*, s*], [-s, c]] applied to rows k, k+1
            for j in k..=hi {
                let a1 = h[(k, j)];
                let a2 = h[(k + 1, j)];
                h[(k, j)] = c.conj() * a1 + s.conj() * a2;
                h[(k + 1, j)] = -s * a1 + c * a2;
            }
            rots.push((c, s));
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (c, s) = rots[idx];
            // right-multiply columns k, k+1 by G^dagger = [[c, -s*], [s, c*]]
            for i in lo..=(k + 1).min(hi) {
                let a1 = h[(i, k)];
                let a2 = h[(i, k + 1)];
                h[(i, k)] = a1 * c + a2 * s;
                h[(i, k + 1)] = -a1 * s.conj() + a2 * c.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

fn sort_eigenvalues(eigs: &mut [C64]) {
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re));
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-12 * scale;
    let mut start = 0;
    while start < eigs.len() {
        let mut end = start + 1;
        while end < eigs.len() && (eigs[end - 1].re - eigs[end].re).abs() <= tol {
            end += 1;
        }
        eigs[start..end].sort_by(|a, b| b.im.total_cmp(&a.im));
        start = end;
    }
}

/// Thin singular value decomposition `A = U diag(s) V^dagger`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `m x n`, columns are left singular vectors (zero columns for zero
    /// singular values).
    pub u: ComplexMatrix,
    /// `n x n`, columns are right singular vectors.
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD. Requires `rows >= cols`.
pub fn svd(a: &ComplexMatrix) -> Result<Svd, NumericsError> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(NumericsError::DimensionMismatch { expected: n, found: m });
    }
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    const MAX_SWEEPS: usize = 80;
    let mut converged = n < 2;
    let tol = m as f64 * f64::EPSILON;
    // Columns this small are numerically zero; rotating them only stirs noise.
    let floor = (f64::EPSILON * a.frobenius()).powi(2);
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = w.col_norm_sqr(p);
                let beta = w.col_norm_sqr(q);
                let gamma = w.col_dot(p, q);
                if gamma.norm() <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                let rot = jacobi_rotation(alpha, beta, gamma);
                w.rotate_cols(p, q, &rot);
                v.rotate_cols(p, q, &rot);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(NumericsError::NoConvergence { routine: "svd", iterations: MAX_SWEEPS });
    }
    let norms: Vec<f64> = (0..n).map(|j| w.col_norm_sqr(j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = ComplexMatrix::zeros(m, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let s = norms[src];
        singular_values.push(s);
        for i in 0..m {
            u[(i, k)] = if s > 0.0 { w[(i, src)] / s } else { C64::new(0.0, 0.0) };
        }
        for i in 0..n {
            vs[(i, k)] = v[(i, src)];
        }
    }
    Ok(Svd { singular_values, u, v: vs })
}

/// Result of [`solve_constrained_null`].
#[derive(Debug, Clone)]
pub struct NullSolution {
    pub x: Vec<C64>,
    /// Euclidean norm of `l x`.
    pub residual: f64,
    /// Number of singular values of `l` at or below
    /// `NULL_SPACE_THRESHOLD * ||l||_inf`.
    pub null_dim: usize,
}

impl NullSolution {
    /// `false` when the null space has dimension other than one; `x` is
    /// then one representative (the minimum-norm one).
    pub fn is_unique(&self) -> bool {
        self.null_dim == 1
    }
}

/// Minimizes `||l x||` subject to `constraint . x = value` by solving the
/// augmented system `[l; constraint] x = [0; value]` in the least-squares
/// sense with a truncated pseudo-inverse.
pub fn solve_constrained_null(
    l: &ComplexMatrix,
    constraint: &[C64],
    value: C64,
) -> Result<NullSolution, NumericsError> {
    if !l.is_square() {
        return Err(NumericsError::NotSquare { rows: l.rows, cols: l.cols });
    }
    let n = l.cols;
    if constraint.len() != n {
        return Err(NumericsError::DimensionMismatch { expected: n, found: constraint.len() });
    }
    if constraint.iter().all(|z| z.norm() == 0.0) {
        return Err(NumericsError::ZeroConstraint);
    }
    let lnorm = l.norm_inf();
    let threshold = NULL_SPACE_THRESHOLD * lnorm;
    let null_dim = svd(l)?.singular_values.iter().filter(|&&s| s <= threshold).count();

    let mut aug = ComplexMatrix::zeros(n + 1, n);
    aug.data[..n * n].copy_from_slice(&l.data);
    aug.data[n * n..].copy_from_slice(constraint);
    let mut rhs = vec![C64::new(0.0, 0.0); n + 1];
    rhs[n] = value;
    let dec = svd(&aug)?;
    let cutoff = NULL_SPACE_THRESHOLD * aug.norm_inf();
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff {
            continue;
        }
        let coef: C64 = (0..n + 1).map(|i| dec.u[(i, k)].conj() * rhs[i]).sum::<C64>() / s;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += dec.v[(i, k)] * coef;
        }
    }
    let residual = l.matvec(&x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(NullSolution { x, residual, null_dim })
}
