//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Every operator and state in the crate is carried by [`ComplexMatrix`] or
//! [`KetVector`]. Storage is dense and row-major; the spaces of interest are
//! at most a few dozen levels, where dense products beat any sparse scheme.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use faer::complex_native::c64;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest dimension `kron` will produce.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Relative tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A square, finite, dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| re(x)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from row-major entries. Rejects non-square input and
    /// non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("matrix rows must form a square".into()));
        }
        Self::from_row_major(dim, rows.concat())
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &KetVector, b: &KetVector) -> Result<Self> {
        check_dims(a.dim(), b.dim())?;
        let n = a.dim();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        Ok(m)
    }

    /// Projector |v⟩⟨v|.
    pub fn projector(v: &KetVector) -> Self {
        Self::outer(v, v).expect("same vector")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self += s * other`, dimensions assumed equal.
    pub fn add_scaled(&mut self, s: Complex64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checked matrix product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(self * other)
    }

    pub fn apply(&self, v: &KetVector) -> Result<KetVector> {
        check_dims(self.dim, v.dim())?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect();
        Ok(KetVector::new(amps))
    }

    /// ⟨a|M|b⟩
    pub fn matrix_element(&self, a: &KetVector, b: &KetVector) -> Result<Complex64> {
        let mb = self.apply(b)?;
        a.inner(&mb)
    }

    /// ‖M − M†‖_F
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Hermitian within [`HERMITIAN_TOL`] relative to the matrix norm
    /// (absolute for matrices of norm below one).
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.frobenius_norm().max(1.0)
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
            }
        }
        out
    }

    /// Restriction ⟨b_i|M|b_j⟩ onto the span of `basis`.
    pub fn restrict(&self, basis: &[KetVector]) -> Result<Self> {
        let images: Vec<KetVector> = basis.iter().map(|b| self.apply(b)).collect::<Result<_>>()?;
        let k = basis.len();
        let mut out = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = basis[i].inner(&images[j])?;
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
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

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Unchecked product; panics on a dimension mismatch.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// A state vector in a `dim`-level Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct KetVector {
    amps: Vec<Complex64>,
}

impl KetVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "ket dimension must be positive");
        Self { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&x| re(x)).collect())
    }

    /// Computational basis vector |index⟩.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite ket".into()));
        }
        Ok(self.scale(re(1.0 / n)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { amps: self.amps.iter().map(|&z| z * s).collect() }
    }

    /// a·self + b·other
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            amps: self.amps.iter().zip(&other.amps).map(|(&x, &y)| a * x + b * y).collect(),
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }
}

impl Index<usize> for KetVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

impl IndexMut<usize> for KetVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.amps[i]
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimensionMismatch { expected: a, found: b })
    } else {
        Ok(())
    }
}

/// Kronecker product with the default size limit.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

/// Entry `(i·m + k, j·m + l)` of the result is `a[i,j]·b[k,l]` where `m = b.dim()`.
pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let (n, m) = (a.dim(), b.dim());
    let dim = n
        .checked_mul(m)
        .filter(|&d| d <= max_dim)
        .ok_or_else(|| Error::InvalidInput(format!("kron dimension {n}x{m} exceeds limit {max_dim}")))?;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidInput("kron of an empty list".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| kron(&acc, f))
}

/// [a, b] = ab − ba
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(&(a * b) - &(b * a))
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.trace()
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

/// Spectrum of a Hermitian matrix.
///
/// Eigenvalues are ascending. Within a degenerate eigenspace the eigenvectors
/// are orthonormal but their choice is not stable across inputs.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<KetVector>,
}

pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian(a.hermiticity_defect()));
    }
    let h = a.hermitian_part();
    let n = h.dim();
    let m = Mat::<c64>::from_fn(n, n, |i, j| h[(i, j)].into());
    let eig = m.selfadjoint_eigendecomposition(Side::Lower);
    let (u, s) = (eig.u(), eig.s().column_vector());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s.read(i).re.total_cmp(&s.read(j).re));
    let eigenvalues = order.iter().map(|&k| s.read(k).re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| KetVector::new((0..n).map(|i| u.read(i, k).into()).collect()))
        .collect();
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(a)?.eigenvalues[0])
}

/// Pauli matrices and qubit dyads used throughout the tests and models.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        frobenius_distance(a, b).unwrap() <= tol
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let zz = kron(&pauli::z(), &i2).unwrap();
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_xx_flips_both_qubits() {
        // |00> = e_0, |11> = e_3 in the (q0 q1) ordering
        let xx = kron(&pauli::x(), &pauli::x()).unwrap();
        let out = xx.apply(&KetVector::basis(4, 0)).unwrap();
        assert_eq!(out, KetVector::basis(4, 3));
    }

    #[test]
    fn kron_respects_size_limit() {
        let a = ComplexMatrix::identity(64);
        assert!(kron(&a, &a).is_ok());
        assert!(kron(&a, &ComplexMatrix::identity(65)).is_err());
        assert!(kron_with_limit(&a, &ComplexMatrix::identity(2), 100).is_err());
    }

    #[test]
    fn commutator_examples() {
        let x = pauli::x();
        assert_eq!(commutator(&x, &x).unwrap().max_abs(), 0.0);
        let xy = commutator(&x, &pauli::y()).unwrap();
        assert!(close(&xy, &pauli::z().scale(c(0.0, 2.0)), 1e-15));
        let p0 = ComplexMatrix::projector(&KetVector::basis(2, 0));
        assert_eq!(commutator(&pauli::z(), &p0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatch() {
        let err = commutator(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_trace_distance() {
        let ii = ComplexMatrix::identity(3).scale(I);
        assert_eq!(dagger(&ii), ComplexMatrix::identity(3).scale(-I));
        assert_eq!(trace(&ComplexMatrix::identity(5)), re(5.0));
        let y = pauli::y();
        assert_eq!(frobenius_distance(&y, &y).unwrap(), 0.0);
        assert!(frobenius_distance(&y, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let eig = hermitian_eigen(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigen_of_pauli_x() {
        let eig = hermitian_eigen(&pauli::x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = KetVector::from_real(&[h, -h]);
        let plus = KetVector::from_real(&[h, h]);
        // eigenvectors are defined up to a phase
        assert!((eig.eigenvectors[0].inner(&minus).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!((eig.eigenvectors[1].inner(&plus).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn non_finite_entries_rejected() {
        let r = ComplexMatrix::from_row_major(1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
