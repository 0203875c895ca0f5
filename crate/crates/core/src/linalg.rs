//! Dense complex matrices and the spectral primitives the rest of the crate
//! is built on: adjoints, products, a cyclic Jacobi eigensolver for Hermitian
//! matrices, PSD fractional powers, the operator absolute value and the
//! operator norm.
//!
//! Everything here is a pure function of its inputs. Matrices are stored
//! row-major as `Complex64` values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const DEFAULT_EIG_TOL: f64 = 1e-13;

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Relative asymmetry `‖A − A*‖_F / ‖A‖_F` above which a matrix is rejected
/// as non-Hermitian instead of being symmetrized.
pub const HERMITIAN_REJECT_TOL: f64 = 1e-8;

/// Eigenvalues of a nominally PSD matrix may dip this far below zero
/// (relative to the spectral radius) before the matrix is rejected.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn from_complex_diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Real matrix from nested rows. Panics on ragged input; intended for
    /// literals in tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(n, m, data).expect("finite literal")
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
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

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A* A`, exactly Hermitian in floating point.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..self.rows {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of dimension {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        let out = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x.entries())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(ComplexVector { data: out })
    }

    /// `⟨A x, x⟩`.
    pub fn quadratic_form(&self, x: &ComplexVector) -> Result<Complex64> {
        Ok(self.apply(x)?.inner(x))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖A − A*‖_F`.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            data: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &Self, op: &str) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "{op} of {}x{} and {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_shape(rhs, "sum");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.same_shape(rhs, "difference");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::multiply`] for the
    /// fallible form.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.multiply(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::DimensionMismatch(
                "vector dimension must be positive".into(),
            ));
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { data })
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect()).expect("finite literal")
    }

    /// Standard basis vector `e_k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut data = vec![ZERO; dim];
        data[k] = ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// `⟨self, other⟩ = Σ selfᵢ · conj(otherᵢ)`, linear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Eigenvalues (ascending) and unitary eigenvectors (columns) of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V · diag(f(λ)) · V*`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, &m) in mapped.iter().enumerate() {
                    if m != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * m;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_map(|l| l)
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Eigenvector for the largest eigenvalue.
    pub fn top_vector(&self) -> ComplexVector {
        self.vectors.column(self.values.len() - 1)
    }
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn multiply(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.multiply(b)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// The input is symmetrized as `(A + A*)/2`; an asymmetry above
/// [`HERMITIAN_REJECT_TOL`] relative to `‖A‖_F` is an error. Iteration stops
/// once the off-diagonal Frobenius norm drops to `tol · ‖A‖_F`. Sweeps visit
/// pairs `(p, q)` in row-cyclic order, so the result is deterministic.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    let n = a.ensure_square()?;
    let fro = a.frobenius_norm();
    let asym = a.asymmetry();
    if asym > HERMITIAN_REJECT_TOL * fro {
        return Err(Error::NotHermitian {
            asymmetry: if fro > 0.0 { asym / fro } else { asym },
        });
    }
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol * fro;

    let mut converged = false;
    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi step annihilating `m[p][q]`: `m ← U* m U`, `v ← v U`, where
/// `U` acts on coordinates `p, q` with columns `c·e_p − s·ē·e_q` and
/// `s·e_p + c·ē·e_q`, `e` being the phase of `m[p][q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let s_conj_phase = phase.conj() * s;
    let c_conj_phase = phase.conj() * c;
    let s_phase = phase * s;
    let c_phase = phase * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * s_conj_phase;
        m[(k, q)] = akp * s + akq * c_conj_phase;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - aqk * s_phase;
        m[(q, k)] = apk * s + aqk * c_phase;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s_conj_phase;
        v[(k, q)] = vkp * s + vkq * c_conj_phase;
    }
}

/// Spectrum of a Hermitian PSD matrix with round-off negatives clamped to
/// zero. Reused to form many fractional powers from one decomposition.
#[derive(Debug, Clone)]
pub struct PsdSpectrum {
    eig: EigenDecomposition,
}

impl PsdSpectrum {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let mut eig = hermitian_eig(a, DEFAULT_EIG_TOL)?;
        let radius = eig.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let lowest = eig.min();
        if lowest < -PSD_CLAMP_TOL * radius {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
        for l in &mut eig.values {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        Ok(Self { eig })
    }

    /// `A^t` with `0^0 = 1`, so `A^0` is the identity.
    pub fn power(&self, t: f64) -> Result<ComplexMatrix> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeExponent(t));
        }
        if t == 1.0 {
            return Ok(self.eig.reconstruct());
        }
        Ok(self.eig.spectral_map(|l| l.powf(t)))
    }

    pub fn values(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn decomposition(&self) -> &EigenDecomposition {
        &self.eig
    }
}

pub fn psd_power(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeExponent(t));
    }
    PsdSpectrum::new(a)?.power(t)
}

/// `|T| = (T* T)^{1/2}`.
pub fn abs_operator(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.ensure_square()?;
    psd_power(&t.gram(), 0.5)
}

/// Largest singular value, `sqrt(λ_max(A* A))`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let eig = hermitian_eig(&a.gram(), DEFAULT_EIG_TOL)
        .expect("Gram matrix is Hermitian and Jacobi converges on it");
    eig.max().max(0.0).sqrt()
}

/// Norm of a Hermitian matrix, i.e. its spectral radius.
pub fn hermitian_norm(a: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(a, DEFAULT_EIG_TOL)?;
    Ok(eig.max().abs().max(eig.min().abs()))
}

/// Fractional powers of `|T|` and `|T*|` from one eigendecomposition each
/// of `T*T` and `TT*`: `|T|^s = (T*T)^{s/2}`.
#[derive(Debug, Clone)]
pub struct AbsPowers {
    abs: PsdSpectrum,
    abs_adj: PsdSpectrum,
}

impl AbsPowers {
    pub fn new(t: &ComplexMatrix) -> Result<Self> {
        t.ensure_square()?;
        Ok(Self {
            abs: PsdSpectrum::new(&t.gram())?,
            abs_adj: PsdSpectrum::new(&t.adjoint().gram())?,
        })
    }

    /// `|T|^s`.
    pub fn abs_pow(&self, s: f64) -> Result<ComplexMatrix> {
        self.abs.power(s / 2.0)
    }

    /// `|T*|^s`.
    pub fn abs_adj_pow(&self, s: f64) -> Result<ComplexMatrix> {
        self.abs_adj.power(s / 2.0)
    }
}
