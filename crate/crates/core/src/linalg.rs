//! Dense complex linear algebra on square matrices.
//!
//! [`ComplexMatrix`] is the single operator representation used throughout the
//! crate. Storage is row-major. Heavy kernels (matrix products, Hermitian
//! eigensolvers, singular values) are delegated to `faer`, always run
//! sequentially so that results do not depend on the worker count.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest matrix dimension any builder is allowed to produce.
pub const MAX_DIM: usize = 8192;

/// Relative Hermiticity tolerance: `max |A_ij - conj(A_ji)| <= HERMITIAN_TOL * max |A_ij|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Idempotency tolerance for projectors handed to [`projected_norm`].
pub const PROJECTOR_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex square matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim > 8 {
            return write!(f, "ComplexMatrix {{ dim: {}, .. }}", self.dim);
        }
        writeln!(f, "ComplexMatrix {{ dim: {} }}", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// # Panics
    /// Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diag(&vec![1.0; dim])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_row_major(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Matrix product via `faer`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        {
            let dst = MatMut::from_row_major_slice_mut(&mut out.data, n, n);
            matmul(dst, Accum::Replace, self.view(), rhs.view(), ONE, Par::Seq);
        }
        out
    }

    /// `self† · mid · self`
    pub fn conjugate(&self, mid: &Self) -> Self {
        self.adjoint().matmul(&mid.matmul(self))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Top-left `n × n` block.
    pub fn truncate(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.dim, "truncation out of range");
        Self::from_fn(n, |i, j| self[(i, j)])
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |A_ij - conj(A_ji)|`
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    /// `max_ij |A_ij + conj(A_ji)|`
    pub fn skew_hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] + self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `(A + A†) / 2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Result<f64> {
        if self.max_abs() == 0.0 {
            return Ok(0.0);
        }
        if self.is_hermitian() {
            let vals = hermitian_eigvals(self)?;
            return Ok(vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        }
        let sv = self
            .view()
            .singular_values()
            .map_err(|_| Error::NoConvergence {
                dim: self.dim,
                index: None,
            })?;
        Ok(sv.first().copied().unwrap_or(0.0))
    }

    pub(crate) fn view(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.dim, self.dim)
    }

    fn real_copy(&self) -> Mat<f64> {
        let n = self.dim;
        Mat::from_fn(n, n, |i, j| self.data[i * n + j].re)
    }

    fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    fn from_faer_real(m: MatRef<'_, f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| C64::new(m[(i, j)], 0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        self.data
            .iter_mut()
            .zip(&rhs.data)
            .for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        self.data
            .iter_mut()
            .zip(&rhs.data)
            .for_each(|(a, b)| *a -= b);
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self += &rhs;
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self -= &rhs;
        self
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale_c(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// `[A, B] = AB - BA`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b) - b.matmul(a)
}

/// `{A, B} = AB + BA`
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b) + b.matmul(a)
}

/// Kronecker product with the first factor index major: `(A⊗B)[(i·dB + k, j·dB + l)] = A_ij B_kl`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (da, db) = (a.dim, b.dim);
    let dim = da
        .checked_mul(db)
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::Sizing {
            dim: da.saturating_mul(db),
            max: MAX_DIM,
        })?;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * dim + j * db;
                let brow = &b.data[k * db..(k + 1) * db];
                for (dst, &bkl) in out.data[row..row + db].iter_mut().zip(brow) {
                    *dst = aij * bkl;
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues ascending with orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }
}

fn symmetrized(a: &ComplexMatrix) -> ComplexMatrix {
    let defect = a.hermiticity_defect();
    if defect == 0.0 {
        return a.clone();
    }
    if defect > HERMITIAN_TOL * a.max_abs() {
        log::warn!(
            "eigensolver input is not Hermitian (defect {defect:e}); symmetrizing (A + A†)/2"
        );
    }
    a.hermitian_part()
}

/// Full eigendecomposition of a Hermitian matrix. The input is symmetrized
/// as `(A + A†)/2` first; real inputs take the real symmetric path.
pub fn hermitian_eigs(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let h = symmetrized(a);
    let n = h.dim;
    let fail = |_| Error::NoConvergence {
        dim: n,
        index: None,
    };
    if h.is_real() {
        let evd = h
            .real_copy()
            .self_adjoint_eigen(Side::Lower)
            .map_err(fail)?;
        let values = evd.S().column_vector().iter().copied().collect();
        Ok(EigenDecomposition {
            values,
            vectors: ComplexMatrix::from_faer_real(evd.U()),
        })
    } else {
        let evd = h.view().self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let values = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok(EigenDecomposition {
            values,
            vectors: ComplexMatrix::from_faer(evd.U()),
        })
    }
}

/// Eigenvalues only (ascending).
pub fn hermitian_eigvals(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let h = symmetrized(a);
    let n = h.dim;
    let fail = |_| Error::NoConvergence {
        dim: n,
        index: None,
    };
    if h.is_real() {
        h.real_copy()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(fail)
    } else {
        h.view().self_adjoint_eigenvalues(Side::Lower).map_err(fail)
    }
}

/// `exp(K)` for skew-Hermitian `K`, via the eigendecomposition of the Hermitian `iK`.
pub fn unitary_exp(k: &ComplexMatrix) -> Result<ComplexMatrix> {
    let defect = k.skew_hermiticity_defect();
    if defect > HERMITIAN_TOL * k.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::contract(format!(
            "unitary_exp expects a skew-Hermitian generator (defect {defect:e})"
        )));
    }
    let n = k.dim;
    if k.max_abs() == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let h = k.scale_c(C64::i());
    let evd = hermitian_eigs(&h)?;
    // exp(K) = exp(-iH) = V diag(e^{-i λ}) V†
    let phases: Vec<C64> = evd
        .values
        .iter()
        .map(|&l| C64::from_polar(1.0, -l))
        .collect();
    let v = &evd.vectors;
    let scaled = ComplexMatrix::from_fn(n, |i, j| v[(i, j)] * phases[j]);
    Ok(scaled.matmul(&v.adjoint()))
}

/// Spectral norm `‖P·A·P‖₂` for an orthogonal projector `P`.
pub fn projected_norm(a: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    if a.dim != p.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: p.dim,
        });
    }
    if let Some(idx) = diagonal_projector_support(p) {
        if idx.is_empty() {
            return Ok(0.0);
        }
        return a.principal_submatrix(&idx).spectral_norm();
    }
    let p2 = p.matmul(p);
    let idem = (&p2 - p).max_abs();
    if idem > PROJECTOR_TOL || p.hermiticity_defect() > PROJECTOR_TOL {
        return Err(Error::contract(format!(
            "projected_norm expects an orthogonal projector (idempotency defect {idem:e})"
        )));
    }
    p.matmul(&a.matmul(p)).spectral_norm()
}

/// Index set of a diagonal 0/1 projector, or `None` if `p` is not of that form.
fn diagonal_projector_support(p: &ComplexMatrix) -> Option<Vec<usize>> {
    let n = p.dim;
    let mut idx = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = p[(i, j)];
            if i != j {
                if z != ZERO {
                    return None;
                }
            } else if z == ONE {
                idx.push(i);
            } else if z != ZERO {
                return None;
            }
        }
    }
    Some(idx)
}
