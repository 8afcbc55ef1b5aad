//! Dense complex matrices for operators on `2^n`-dimensional qubit registers.
//!
//! `CMatrix` is a thin square wrapper over `nalgebra::DMatrix<Complex64>`.
//! Only the operations the estimation code needs are exposed: products,
//! Kronecker products, traces, Hermitian eigendecomposition, positivity
//! tests and the positive square root.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for `A = A†`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as roundoff and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Builds a matrix from row-major entries. Panics unless `entries.len()` is a perfect square.
    pub fn from_row_major(entries: &[Complex64]) -> Self {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, entries.len(), "entry count must be a square");
        Self::from_fn(dim, |i, j| entries[i * dim + j])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.inner[(i, i)] = c(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` for an (unnormalized) column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Self {
        assert!(
            inner.is_square() && inner.nrows() >= 1,
            "matrix must be square"
        );
        Self { inner }
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.inner[(i, j)] = z;
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.inner[(i, k)] * other.inner[(k, i)];
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    /// `self · x · self†`
    pub fn conjugate(&self, x: &CMatrix) -> Self {
        Self {
            inner: &self.inner * &x.inner * self.inner.adjoint(),
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            Err(Error::NotHermitian { residual })
        } else {
            Ok(())
        }
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()).map(|z| z * 0.5),
        }
    }

    /// Maximum entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) - &(b * a)
}

/// Kronecker product: entry `(i·db + k, j·db + l)` holds `a[i,j]·b[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

/// Kronecker power `a^{⊗n}`, `n ≥ 1`.
pub fn kron_power(a: &CMatrix, n: usize) -> CMatrix {
    assert!(n >= 1, "Kronecker power needs n >= 1");
    let mut out = a.clone();
    for _ in 1..n {
        out = kron(&out, a);
    }
    out
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.inner.column(k).iter().copied().collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `V · diag(g(λ)) · V†`
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors.inner;
        let mut scaled = v.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let s = g(lam);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        CMatrix {
            inner: scaled * v.adjoint(),
        }
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&l| l > tol).count()
    }
}

/// Hermitian eigendecomposition (eigenvalues ascending).
pub fn herm_eig(a: &CMatrix) -> Result<HermitianEig> {
    a.ensure_hermitian()?;
    let sym = a.hermitian_part();
    let eig = nalgebra::SymmetricEigen::new(sym.inner);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = order.len();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, col| eig.eigenvectors[(i, order[col])]);
    Ok(HermitianEig {
        values,
        vectors: CMatrix { inner: vectors },
    })
}

/// True iff the smallest eigenvalue is `≥ -tol`.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<bool> {
    Ok(herm_eig(a)?.min() >= -tol)
}

/// Positive square root of a positive semidefinite matrix.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(a)?;
    if eig.min() < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let floor = 64.0 * f64::EPSILON * eig.max().abs().max(1.0);
    Ok(eig.map_spectrum(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_row_major(&[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_major(&[ZERO, -I, I, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_major(&[ONE, ZERO, ZERO, -ONE])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&CMatrix::identity(2), &CMatrix::identity(2));
        assert_eq!(k, CMatrix::identity(4));
    }

    #[test]
    fn kron_index_layout() {
        let k = kron(&pauli::z(), &CMatrix::identity(2));
        let diag: Vec<f64> = (0..4).map(|i| k.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        // a[0,1]·b[1,0] lands at (0·2+1, 1·2+0)
        let k = kron(&pauli::x(), &pauli::y());
        assert_eq!(k.get(1, 2), pauli::x().get(0, 1) * pauli::y().get(1, 0));
    }

    #[test]
    fn pauli_spectrum() {
        let e = herm_eig(&pauli::z()).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let e = herm_eig(&pauli::y()).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_one_projector_spectrum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = CMatrix::outer(&[ZERO, c(s, 0.0), c(-s, 0.0), ZERO]);
        let e = herm_eig(&singlet).unwrap();
        for (got, want) in e.values.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert_eq!(e.rank(1e-12), 1);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = CMatrix::from_row_major(&[ONE, ONE, ZERO, ONE]);
        assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(is_psd(&a, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_checks() {
        assert!(!is_psd(&pauli::z(), 1e-10).unwrap());
        assert!(is_psd(&CMatrix::identity(3), 1e-10).unwrap());
        let neg = CMatrix::from_real_diagonal(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
        // roundoff-level negativity is clamped
        let tiny = CMatrix::from_real_diagonal(&[1.0, -1e-12]);
        let r = psd_sqrt(&tiny).unwrap();
        assert_abs_diff_eq!(r.get(1, 1).re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sqrt_of_scaled_projector() {
        let p = CMatrix::outer(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let r = psd_sqrt(&p.scale(4.0)).unwrap();
        assert!(r.max_abs_diff(&p.scale(2.0)) < 1e-12);
        assert!(
            psd_sqrt(&CMatrix::identity(4))
                .unwrap()
                .max_abs_diff(&CMatrix::identity(4))
                < 1e-14
        );
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = &pauli::x() + &pauli::z().scale(0.3);
        let b = &pauli::y() + &CMatrix::identity(2);
        let full = (&a * &b).trace();
        assert_abs_diff_eq!(a.trace_product(&b).re, full.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.trace_product(&b).im, full.im, epsilon = 1e-15);
    }
}
